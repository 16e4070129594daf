#include "etest/io.hpp"

#include <cmath>
#include <limits>

#include "etest/errors.hpp"

namespace etest::io {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const Json& require(const Json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) throw InputError("missing field \"" + key + "\"");
  return j.at(key);
}

double number_or(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return real_from_json(j.at(key), key);
}

Json real_to_json(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double real_from_json(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError("field \"" + what + "\" must be a number or \"inf\"");
}

Json reals_to_json(const std::vector<double>& xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(real_to_json(x));
  return out;
}

std::vector<double> reals_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError("field \"" + what + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(real_from_json(v, what));
  return out;
}

FiniteDistribution distribution_from_json(const Json& j, const std::string& what) {
  if (j.is_array()) return FiniteDistribution::from_probs(reals_from_json(j, what));
  if (j.is_object()) {
    auto probs = reals_from_json(require(j, "probs"), what + ".probs");
    const auto& labels = require(j, "outcomes");
    if (!labels.is_array()) throw InputError(what + ".outcomes must be an array");
    std::vector<std::string> names;
    for (const auto& l : labels) {
      if (!l.is_string()) throw InputError(what + ".outcomes must hold strings");
      names.push_back(l.get<std::string>());
    }
    return FiniteDistribution(std::move(names), std::move(probs));
  }
  throw InputError("field \"" + what + "\" must describe a distribution");
}

Json distribution_to_json(const FiniteDistribution& d) {
  return Json{{"outcomes", d.outcomes()}, {"probs", reals_to_json({d.probs().begin(), d.probs().end()})}};
}

Utility utility_from_json(const Json& j) {
  if (j.is_null()) return Utility::log();
  const auto& kind = require(j, "utility");
  if (!kind.is_string()) throw InputError("\"utility\" must be a string");
  const auto name = kind.get<std::string>();
  if (name == "log") return Utility::log();
  if (name == "power") return Utility::power(real_from_json(require(j, "h"), "h"));
  throw InputError("unknown utility \"" + name + "\"");
}

Json utility_to_json(const Utility& u) {
  const auto h = u.exponent();
  if (!h) return Json{{"utility", "custom"}, {"name", u.name()}};
  if (*h == 0.0) return Json{{"utility", "log"}};
  return Json{{"utility", "power"}, {"h", *h}};
}

ContinuousTest test_from_json(const Json& j) {
  const Level level(real_from_json(require(j, "alpha"), "alpha"));
  const auto kind = require(j, "kind").get<std::string>();
  if (kind == "tabulated") {
    const auto& rows = require(j, "values");
    if (!rows.is_array()) throw InputError("\"values\" must be an array");
    std::vector<std::string> outcomes;
    std::vector<double> values;
    for (const auto& r : rows) {
      outcomes.push_back(require(r, "outcome").get<std::string>());
      values.push_back(real_from_json(require(r, "value"), "value"));
    }
    return ContinuousTest::tabulated(level, std::move(outcomes), std::move(values));
  }
  if (kind == "gaussian") {
    GaussianBody body;
    body.mu = real_from_json(require(j, "mu"), "mu");
    body.sigma = real_from_json(require(j, "sigma"), "sigma");
    body.h = real_from_json(require(j, "h"), "h");
    body.log_inflation = number_or(j, "log_inflation", 0.0);
    if (j.contains("threshold")) body.threshold = real_from_json(j.at("threshold"), "threshold");
    return ContinuousTest::gaussian(level, body);
  }
  throw InputError("unknown test kind \"" + kind + "\"");
}

Json test_to_json(const ContinuousTest& t) {
  Json out{{"alpha", t.level().alpha()}};
  if (t.is_tabulated()) {
    out["kind"] = "tabulated";
    Json rows = Json::array();
    const auto& tab = t.table();
    for (std::size_t i = 0; i < tab.values.size(); ++i)
      rows.push_back(Json{{"outcome", tab.outcomes[i]}, {"value", real_to_json(tab.values[i])}});
    out["values"] = std::move(rows);
  } else {
    const auto& g = t.gaussian_body();
    out["kind"] = "gaussian";
    out["mu"] = g.mu;
    out["sigma"] = g.sigma;
    out["h"] = g.h;
    out["log_inflation"] = real_to_json(g.log_inflation);
    if (g.threshold) out["threshold"] = real_to_json(*g.threshold);
  }
  return out;
}

Json simple_solution_to_json(const SimpleSolution& s) {
  Json out{{"lambda_star", real_to_json(s.lambda_star)},
           {"test", test_to_json(s.test)},
           {"objective", real_to_json(s.objective)},
           {"power", real_to_json(s.power)},
           {"null_expectation", real_to_json(s.null_expectation)},
           {"iterations", s.iterations}};
  if (s.inflation) out["inflation"] = real_to_json(*s.inflation);
  if (s.boundary)
    out["boundary"] = Json{{"critical_value", real_to_json(s.boundary->critical_value)},
                           {"boundary_value", real_to_json(s.boundary->boundary_value)}};
  return out;
}

Json composite_solution_to_json(const CompositeSolution& s) {
  Json out{{"values", reals_to_json(s.values)},
           {"objective", real_to_json(s.objective)},
           {"multipliers", reals_to_json(s.multipliers)},
           {"ripr", Json{{"outcomes", s.ripr.outcomes},
                         {"mass", reals_to_json(s.ripr.mass)},
                         {"total_mass", real_to_json(s.ripr.total_mass)}}},
           {"foc_slack", real_to_json(s.foc_slack)},
           {"duality_gap", s.duality_gap ? real_to_json(*s.duality_gap) : Json(nullptr)},
           {"iterations", s.iterations},
           {"restarts", s.restarts},
           {"restart_spread", real_to_json(s.restart_spread)}};
  return out;
}

Json simulation_to_json(const SimulationSummary& s) {
  Json q = Json::object();
  for (std::size_t i = 0; i < s.quantile_levels.size(); ++i) {
    char key[16];
    std::snprintf(key, sizeof key, "q%02d", static_cast<int>(std::lround(s.quantile_levels[i] * 100)));
    q[key] = real_to_json(s.terminal_quantiles[i]);
  }
  return Json{{"paths", s.paths},
              {"horizon", s.horizon},
              {"crossing_frequency", s.crossing_frequency},
              {"crossing_se", s.crossing_se},
              {"max_wealth", real_to_json(s.max_wealth)},
              {"terminal_quantiles", std::move(q)},
              {"mean_log_growth", real_to_json(s.mean_log_growth)},
              {"log_growth_se", real_to_json(s.log_growth_se)}};
}

Json validity_to_json(const ValidityReport& r) {
  return Json{{"max_expectation", real_to_json(r.max_expectation)},
              {"valid", r.valid},
              {"violations", r.violations},
              {"expectations", reals_to_json(r.expectations)}};
}

}  // namespace etest::io
