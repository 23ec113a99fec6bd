#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cascade/costs.hpp"
#include "cascade/liability.hpp"
#include "cascade/model.hpp"
#include "cascade/solvers.hpp"

namespace cascade::io {

/// Shortest round-trip-safe decimal rendering (17 significant digits).
std::string format_g17(double value);

/// Writes content through a temp file in the same directory, then renames.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Problem files are JSON: {"losses": [...], "technologies": [{"family":
/// "sqrt"|"powerexp"|"softcap", ...params}]}. Throws std::invalid_argument
/// on malformed input.
Problem load_problem(const std::filesystem::path& path);
Problem parse_problem(const std::string& text);
std::string problem_json(const Problem& pr);

/// Liability matrices are plain n x n CSV, row = disruptor. The loader
/// validates shape, finiteness, nonnegativity and zeros below the diagonal
/// (balance is audited separately through check_axioms).
LiabilityMatrix load_matrix_csv(const std::filesystem::path& path,
                                const std::vector<double>& losses);
std::string matrix_csv(const LiabilityMatrix& phi);

/// Pi-weight files are a JSON array of n numbers.
PiWeights load_pi_json(const std::filesystem::path& path, std::size_t n);

/// SolveResult CSV: agent,investment,residual.
std::string solve_csv(const SolveResult& result);

/// CostReport CSV: agent,expected_cost,investment,p_disrupt plus one
/// trailing row (agent = "none") carrying the no-disruption probability.
std::string cost_csv(const CostReport& report, const Profile& x);

}  // namespace cascade::io
