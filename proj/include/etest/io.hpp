#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "etest/bridge.hpp"
#include "etest/composite_opt.hpp"
#include "etest/evidence.hpp"
#include "etest/measure.hpp"
#include "etest/sequential.hpp"
#include "etest/simple_opt.hpp"
#include "etest/utility.hpp"

namespace etest::io {

using Json = nlohmann::ordered_json;

// Extended reals: +-inf travel as the strings "inf" / "-inf".
Json real_to_json(double x);
double real_from_json(const Json& j, const std::string& what);
Json reals_to_json(const std::vector<double>& xs);
std::vector<double> reals_from_json(const Json& j, const std::string& what);

// Either a bare probability array or {"outcomes": [...], "probs": [...]}.
FiniteDistribution distribution_from_json(const Json& j, const std::string& what);
Json distribution_to_json(const FiniteDistribution& d);

Utility utility_from_json(const Json& j);
Json utility_to_json(const Utility& u);

ContinuousTest test_from_json(const Json& j);
Json test_to_json(const ContinuousTest& t);

Json simple_solution_to_json(const SimpleSolution& s);
Json composite_solution_to_json(const CompositeSolution& s);
Json simulation_to_json(const SimulationSummary& s);
Json validity_to_json(const ValidityReport& r);

const Json& require(const Json& j, const std::string& key);
double number_or(const Json& j, const std::string& key, double fallback);

}  // namespace etest::io
