#include "commands.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "etest/errors.hpp"
#include "etest/gaussian.hpp"

namespace etest::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t require_seed(const Options& opt, const char* what) {
  if (!opt.seed) throw InputError(std::string(what) + " draws random numbers; pass --seed");
  return *opt.seed;
}

std::size_t count_or(const Json& j, const std::string& key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InputError("\"" + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<FiniteDistribution> nulls_from_json(const Json& j) {
  const auto& list = io::require(j, "H");
  if (!list.is_array() || list.empty()) throw InputError("\"H\" must be a nonempty array of distributions");
  std::vector<FiniteDistribution> out;
  for (std::size_t k = 0; k < list.size(); ++k) out.push_back(io::distribution_from_json(list[k], "H[" + std::to_string(k) + "]"));
  return out;
}

NullModel null_model_from_json(const Json& j) {
  if (j.is_object() && j.contains("gaussian")) {
    const auto& g = j.at("gaussian");
    return GaussianLocation(io::number_or(g, "mu", 0.0), io::number_or(g, "sigma", 1.0));
  }
  return io::distribution_from_json(j, "null");
}

StreamModel stream_from_json(const Json& j) {
  StreamModel s{io::distribution_from_json(io::require(j, "null"), "null"),
                io::distribution_from_json(io::require(j, "alternative"), "alternative")};
  s.validate();
  return s;
}

Strategy strategy_from_json(const Json& j, const StreamModel& stream) {
  const std::string name = j.contains("strategy") ? j.at("strategy").get<std::string>() : "fischer";
  if (name == "fischer") return fischer_strategy(stream, io::utility_from_json(j.value("utility", Json())));
  if (name == "likelihood_ratio") return likelihood_ratio_strategy(stream);
  if (name == "constant") return constant_strategy(io::reals_from_json(io::require(j, "factors"), "factors"));
  throw InputError("unknown strategy \"" + name + "\"");
}

Json conversion(double e, double alpha) {
  const double binary = e_to_binary(e, alpha);
  return Json{{"e", io::real_to_json(e)},
              {"alpha", alpha},
              {"continuous", io::real_to_json(e_to_continuous(e, alpha))},
              {"binary", binary > 0.0 ? "reject" : "accept"},
              {"binary_value", io::real_to_json(binary)},
              {"strong_p", io::real_to_json(strong_p(e))}};
}

}  // namespace

Json solve_simple(const Json& spec, const Options& opt) {
  const auto p = io::distribution_from_json(io::require(spec, "p"), "p");
  const auto q = io::distribution_from_json(io::require(spec, "q"), "q");
  const Level level(io::real_from_json(io::require(spec, "alpha"), "alpha"));
  const Utility u = io::utility_from_json(spec.value("utility", Json()));
  const auto verdict = admissibility(u, level.alpha());
  const SimpleSolution s = optimal_simple(p, q, u, level, opt.tol.value_or(kDefaultLambdaTolerance));
  Json out = io::simple_solution_to_json(s);
  out["utility"] = io::utility_to_json(u);
  out["admissibility"] = Json{{"admissible", verdict.admissible}, {"reason", verdict.reason}};
  return out;
}

Json solve_composite(const Json& spec, const Options& opt) {
  CompositeProblem prob{nulls_from_json(spec), io::distribution_from_json(io::require(spec, "q"), "q"),
                        Level(io::real_from_json(io::require(spec, "alpha"), "alpha")),
                        io::utility_from_json(spec.value("utility", Json()))};
  SolverOptions so;
  so.tol = opt.tol.value_or(so.tol);
  so.seed = opt.seed.value_or(0);
  so.restarts = static_cast<int>(count_or(spec, "restarts", 3));
  so.max_iter = static_cast<int>(count_or(spec, "max_iter", 500));
  const CompositeSolution s = solve_composite(prob, so);
  Json out = io::composite_solution_to_json(s);
  out["test"] = io::test_to_json(s.test(prob));
  out["utility"] = io::utility_to_json(prob.utility);
  return out;
}

std::vector<std::pair<std::string, std::string>> gaussian_figure(const Json& spec) {
  auto defaults_for = [](double alpha) {
    std::vector<double> hs = {-2.0, -1.0, 0.0, 0.5, 0.9};
    if (alpha > 0.0) hs.push_back(1.0);
    return hs;
  };
  auto render = [&](const Json& j, double alpha) {
    const double mu = io::number_or(j, "mu", 1.0);
    const double sigma = io::number_or(j, "sigma", 1.0);
    const auto hs = j.contains("h_list") ? io::reals_from_json(j.at("h_list"), "h_list") : defaults_for(alpha);
    const auto grid = linear_grid(io::number_or(j, "x_min", 0.0), io::number_or(j, "x_max", 10.0),
                                  count_or(j, "n_points", 501));
    return figure_csv(figure_data(mu, sigma, alpha, hs, grid));
  };
  if (spec.is_null() || (spec.is_object() && !spec.contains("alpha"))) {
    const Json base = spec.is_null() ? Json::object() : spec;
    return {{"figure1.csv", render(base, 0.0)}, {"figure2.csv", render(base, 0.05)}};
  }
  const double alpha = io::real_from_json(spec.at("alpha"), "alpha");
  const std::string name = spec.value("out_path", std::string("figure.csv"));
  return {{name, render(spec, alpha)}};
}

Json sequential_sim(const Json& spec, const Options& opt, std::string* paths_csv) {
  const StreamModel stream = stream_from_json(spec);
  SimulationOptions so;
  so.seed = require_seed(opt, "sequential-sim");
  so.paths = count_or(spec, "paths", 10000);
  so.horizon = static_cast<int>(count_or(spec, "horizon", 50));
  so.target = Level(io::number_or(spec, "alpha", 0.1));
  so.workers = static_cast<unsigned>(count_or(spec, "workers", 1));
  so.keep_paths = paths_csv != nullptr;
  const std::string regime = spec.value("regime", std::string("null"));
  if (regime == "null") so.regime = Regime::null;
  else if (regime == "alternative") so.regime = Regime::alternative;
  else throw InputError("\"regime\" must be \"null\" or \"alternative\"");
  const SimulationSummary s = simulate(stream, strategy_from_json(spec, stream), so);
  if (paths_csv) {
    std::ostringstream csv;
    csv << "path,t,wealth\n";
    for (std::size_t k = 0; k < s.wealth_paths.size(); ++k)
      for (std::size_t t = 0; t < s.wealth_paths[k].size(); ++t)
        csv << k << ',' << t << ',' << io::real_to_json(s.wealth_paths[k][t]).dump() << '\n';
    *paths_csv = csv.str();
  }
  Json out = io::simulation_to_json(s);
  out["alpha"] = so.target.alpha();
  out["regime"] = regime;
  out["seed"] = so.seed;
  return out;
}

Json convert(const Json& spec) {
  const double alpha = io::real_from_json(io::require(spec, "alpha"), "alpha");
  const auto& e = io::require(spec, "e");
  if (e.is_array()) {
    Json out = Json::array();
    for (const auto& v : e) out.push_back(conversion(io::real_from_json(v, "e"), alpha));
    return out;
  }
  return conversion(io::real_from_json(e, "e"), alpha);
}

Json convert_csv(const std::string& csv, double alpha) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw InputError("CSV input is empty");
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(cell);
  }
  std::size_t col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "e") col = c;
  if (col == header.size()) throw InputError("CSV input needs a column named \"e\"");
  Json values = Json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    for (std::size_t c = 0; std::getline(ls, cell, ','); ++c) {
      if (c != col) continue;
      if (cell == "inf" || cell == "+inf") {
        values.push_back("inf");
      } else {
        std::size_t used = 0;
        double v = 0.0;
        try {
          v = std::stod(cell, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used == 0 || used != cell.size()) throw InputError("bad CSV value \"" + cell + "\"");
        values.push_back(v);
      }
    }
  }
  return convert(Json{{"alpha", alpha}, {"e", values}});
}

Json audit(const Json& spec, const Options& opt) {
  const auto kind = io::require(spec, "kind").get<std::string>();
  if (kind == "validity") {
    const ContinuousTest test = io::test_from_json(io::require(spec, "test"));
    Json out = io::validity_to_json(check_validity_exact(test, nulls_from_json(spec)));
    out["kind"] = kind;
    return out;
  }
  if (kind == "validity_mc") {
    const ContinuousTest test = io::test_from_json(io::require(spec, "test"));
    const auto est = check_validity_mc(test, null_model_from_json(io::require(spec, "null")),
                                       count_or(spec, "n", 100000), require_seed(opt, "audit"));
    return Json{{"kind", kind},
                {"estimate", est.estimate},
                {"standard_error", est.standard_error},
                {"draws", est.draws},
                {"flagged", est.estimate > 1.0 + 3.0 * est.standard_error}};
  }
  if (kind == "weak_p") {
    const auto alphas = io::reals_from_json(io::require(spec, "alphas"), "alphas");
    const std::string sampler_name = io::require(spec, "sampler").get<std::string>();
    Sampler sampler;
    if (sampler_name == "uniform") {
      sampler = [](std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); };
    } else if (sampler_name == "strong_p") {
      const ContinuousTest test = io::test_from_json(io::require(spec, "test"));
      const NullModel null = null_model_from_json(io::require(spec, "null"));
      sampler = [test, null](std::mt19937_64& rng) {
        if (const auto* fd = std::get_if<FiniteDistribution>(&null)) return strong_p(test.values()[fd->sample(rng)]);
        return strong_p(test.evaluate(std::get<GaussianLocation>(null).sample(rng)));
      };
    } else {
      throw InputError("unknown p-value sampler \"" + sampler_name + "\"");
    }
    Json rows = Json::array();
    for (const auto& r : weak_p_audit(sampler, alphas, count_or(spec, "n", 100000), require_seed(opt, "audit")))
      rows.push_back(Json{{"alpha", r.alpha}, {"frequency", r.frequency}, {"standard_error", r.standard_error}, {"flagged", r.flagged}});
    return Json{{"kind", kind}, {"levels", rows}};
  }
  if (kind == "cross_level") {
    const ContinuousTest test = io::test_from_json(io::require(spec, "test"));
    const auto a = cross_level_audit(test, null_model_from_json(io::require(spec, "null")),
                                     count_or(spec, "n", 100000), require_seed(opt, "audit"));
    return Json{{"kind", kind},
                {"raw_estimate", a.raw_estimate},
                {"raw_se", a.raw_se},
                {"reduced_estimate", a.reduced_estimate},
                {"reduced_se", a.reduced_se},
                {"flagged", a.flagged}};
  }
  if (kind == "optional_stopping") {
    const StreamModel stream = stream_from_json(spec);
    const Level target(io::number_or(spec, "alpha", 0.0));
    const int horizon = static_cast<int>(count_or(spec, "horizon", 3));
    const double value = optional_stopping_audit(stream, strategy_from_json(spec, stream), horizon, target);
    return Json{{"kind", kind}, {"horizon", horizon}, {"max_expected_stopped_wealth", value},
                {"valid", value <= 1.0 + 1e-9}};
  }
  throw InputError("unknown audit kind \"" + kind + "\"");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NonConvergence*>(&e)) return 3;
  if (dynamic_cast<const InfeasibleError*>(&e)) return 2;
  return 1;
}

}  // namespace etest::cli
