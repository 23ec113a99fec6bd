#include "cascade/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cascade::io {

namespace {

using nlohmann::json;

Technology technology_from_json(const json& j) {
    if (!j.is_object() || !j.contains("family"))
        throw std::invalid_argument("technology entry needs a \"family\" field");
    const std::string family = j.at("family").get<std::string>();
    try {
        if (family == "sqrt") return Technology::sqrt_saturating(j.at("scale").get<double>());
        if (family == "powerexp")
            return Technology::power_exponential(j.at("ceiling").get<double>(),
                                                 j.at("rate").get<double>(),
                                                 j.at("exponent").get<double>());
        if (family == "softcap")
            return Technology::soft_cap(j.at("sqrt_weight").get<double>(),
                                        j.at("sqrt_scale").get<double>(),
                                        j.at("slope").get<double>(), j.at("knee").get<double>(),
                                        j.at("width").get<double>());
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("technology entry malformed: ") + e.what());
    }
    throw std::invalid_argument("unknown technology family \"" + family + "\"");
}

nlohmann::ordered_json technology_to_json(const Technology& t) {
    nlohmann::ordered_json j;
    switch (t.family()) {
        case TechFamily::SqrtSaturating:
            j["family"] = "sqrt";
            j["scale"] = t.scale();
            break;
        case TechFamily::PowerExponential:
            j["family"] = "powerexp";
            j["ceiling"] = t.ceiling();
            j["rate"] = t.rate();
            j["exponent"] = t.exponent();
            break;
        case TechFamily::SoftCap:
            j["family"] = "softcap";
            j["sqrt_weight"] = t.sqrt_weight();
            j["sqrt_scale"] = t.sqrt_scale();
            j["slope"] = t.slope();
            j["knee"] = t.knee();
            j["width"] = t.width();
            break;
    }
    return j;
}

}  // namespace

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Problem parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("problem file is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("losses") || !j.contains("technologies"))
        throw std::invalid_argument("problem file needs \"losses\" and \"technologies\"");

    std::vector<double> losses;
    try {
        losses = j.at("losses").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw std::invalid_argument("\"losses\" must be an array of numbers");
    }
    const json& techs = j.at("technologies");
    if (!techs.is_array() || techs.size() != losses.size())
        throw std::invalid_argument("\"technologies\" must match \"losses\" in length");

    std::vector<Technology> technologies;
    technologies.reserve(techs.size());
    for (const json& t : techs) technologies.push_back(technology_from_json(t));
    return Problem(std::move(losses), std::move(technologies));
}

Problem load_problem(const std::filesystem::path& path) { return parse_problem(read_file(path)); }

std::string problem_json(const Problem& pr) {
    nlohmann::ordered_json j;
    j["losses"] = pr.losses;
    j["technologies"] = nlohmann::ordered_json::array();
    for (const Technology& t : pr.technologies) j["technologies"].push_back(technology_to_json(t));
    return j.dump(2) + "\n";
}

LiabilityMatrix load_matrix_csv(const std::filesystem::path& path,
                                const std::vector<double>& losses) {
    const std::size_t n = losses.size();
    std::istringstream in(read_file(path));
    std::vector<double> phi;
    phi.reserve(n * n);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            double v = 0.0;
            std::size_t consumed = 0;
            try {
                v = std::stod(cell, &consumed);
            } catch (const std::exception&) {
                consumed = 0;
            }
            if (consumed != cell.size() || cell.empty())
                throw std::invalid_argument("matrix CSV cell is not a number: \"" + cell + "\"");
            if (!std::isfinite(v)) throw std::invalid_argument("matrix CSV entry not finite");
            if (v < 0.0) throw std::invalid_argument("liabilities must be nonnegative");
            if (col < row && v != 0.0)
                throw std::invalid_argument("entries below the diagonal must be zero");
            phi.push_back(v);
            ++col;
        }
        if (col != n) throw std::invalid_argument("matrix CSV must have n columns per row");
        ++row;
    }
    if (row != n) throw std::invalid_argument("matrix CSV must have n rows");
    return LiabilityMatrix(losses, std::move(phi));
}

std::string matrix_csv(const LiabilityMatrix& phi) {
    std::ostringstream os;
    for (std::size_t i = 0; i < phi.n(); ++i) {
        for (std::size_t j = 0; j < phi.n(); ++j) {
            if (j) os << ',';
            os << format_g17(phi(i, j));
        }
        os << '\n';
    }
    return os.str();
}

PiWeights load_pi_json(const std::filesystem::path& path, std::size_t n) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("pi-weights file is not valid JSON: ") + e.what());
    }
    PiWeights w;
    try {
        w.pi = j.get<std::vector<double>>();
    } catch (const json::exception&) {
        throw std::invalid_argument("pi-weights file must be a JSON array of numbers");
    }
    if (w.pi.size() != n)
        throw std::invalid_argument("pi-weights length must equal the agent count");
    return w;
}

std::string solve_csv(const SolveResult& result) {
    std::ostringstream os;
    os << "agent,investment,residual\n";
    for (std::size_t i = 0; i < result.profile.size(); ++i)
        os << i + 1 << ',' << format_g17(result.profile[i]) << ','
           << format_g17(result.residuals[i]) << '\n';
    return os.str();
}

std::string cost_csv(const CostReport& report, const Profile& x) {
    std::ostringstream os;
    os << "agent,expected_cost,investment,p_disrupt\n";
    for (std::size_t i = 0; i < report.per_agent.size(); ++i)
        os << i + 1 << ',' << format_g17(report.per_agent[i]) << ',' << format_g17(x[i]) << ','
           << format_g17(report.disruptor_probs[i]) << '\n';
    os << "none,,," << format_g17(report.disruptor_probs.back()) << '\n';
    return os.str();
}

}  // namespace cascade::io
