#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "etest/io.hpp"

namespace etest::cli {

using io::Json;

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

Json solve_simple(const Json& spec, const Options& opt);
Json solve_composite(const Json& spec, const Options& opt);
// Returns file name -> CSV body.  An empty spec yields both default figures.
std::vector<std::pair<std::string, std::string>> gaussian_figure(const Json& spec);
Json sequential_sim(const Json& spec, const Options& opt, std::string* paths_csv = nullptr);
Json convert(const Json& spec);
Json convert_csv(const std::string& csv, double alpha);
Json audit(const Json& spec, const Options& opt);

// Exit codes: 0 ok, 1 input error, 2 infeasible, 3 non-convergence.
int exit_code_for(const std::exception& e);

}  // namespace etest::cli
