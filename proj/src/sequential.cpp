#include "etest/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "etest/errors.hpp"
#include "etest/simple_opt.hpp"

namespace etest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PathResult {
  bool crossed = false;
  double peak = 1.0;
  double terminal = 1.0;
  std::vector<double> wealth;
};

PathResult run_path(const StreamModel& stream, const Strategy& strategy,
                    const SimulationOptions& options, std::size_t index) {
  std::mt19937_64 rng(path_seed(options.seed, index));
  const FiniteDistribution& law =
      options.regime == Regime::null ? stream.null_step : stream.alternative_step;
  const double cap = options.target.cap();
  EProcessState state = EProcessState::start(options.target);
  PathResult r;
  if (options.keep_paths) r.wealth.push_back(1.0);
  for (int t = 0; t < options.horizon; ++t) {
    const StepTest step = strategy(state);
    state = update(state, step.factors[law.sample(rng)], step.level);
    r.peak = std::max(r.peak, state.wealth);
    if (state.wealth >= cap) r.crossed = true;
    if (options.keep_paths) r.wealth.push_back(state.wealth);
  }
  r.terminal = state.wealth;
  return r;
}

double empirical_quantile(const std::vector<double>& sorted, double level) {
  const double pos = level * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  // splitmix64 finalizer over the (seed, path) pair
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (path + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

EProcessState update(const EProcessState& state, double factor, double step_level) {
  if (std::isnan(factor) || factor < 0.0) throw InputError("factor must be >= 0");
  EProcessState next = state;
  next.t += 1;
  next.wealth = (state.wealth == 0.0 || factor == 0.0) ? 0.0 : state.wealth * factor;
  const double cap = state.target.cap();
  if (next.wealth > cap && next.wealth <= cap * (1.0 + 1e-12)) next.wealth = cap;
  next.factors.push_back(factor);
  next.levels.push_back(step_level);
  return next;
}

StepTest fischer_step(const EProcessState& state, const StreamModel& stream, const Utility& utility) {
  if (state.target.is_zero()) throw InputError("capped construction needs a target level > 0");
  if (state.wealth <= 0.0) throw InputError("wealth is zero; the process is absorbed");
  const double level = std::min(1.0, state.target.alpha() * state.wealth);
  const SimpleSolution s = optimal_simple(stream.null_step, stream.alternative_step, utility, Level(level));
  StepTest step{std::vector<double>(s.test.values().begin(), s.test.values().end()), level};
  // Keep M * factor <= 1/alpha in floating point as well.
  const double room = state.target.cap() / state.wealth;
  for (double& f : step.factors)
    if (f > room) f = room;
  return step;
}

Strategy fischer_strategy(const StreamModel& stream, const Utility& utility) {
  stream.validate();
  return [stream, utility](const EProcessState& state) {
    if (state.wealth <= 0.0) return StepTest{std::vector<double>(stream.null_step.size(), 0.0), 1.0};
    return fischer_step(state, stream, utility);
  };
}

Strategy likelihood_ratio_strategy(const StreamModel& stream) {
  stream.validate();
  const auto lr = likelihood_ratio(stream.null_step, stream.alternative_step).resolved();
  return [lr](const EProcessState&) { return StepTest{lr, 0.0}; };
}

Strategy constant_strategy(std::vector<double> factors) {
  for (double f : factors)
    if (std::isnan(f) || f < 0.0) throw InputError("factors must be >= 0");
  return [factors = std::move(factors)](const EProcessState&) { return StepTest{factors, 1.0}; };
}

double optional_stopping_audit(const StreamModel& stream, const Strategy& strategy, int horizon,
                               Level target) {
  stream.validate();
  if (stream.null_step.size() > 3) throw InputError("optional stopping audit: at most 3 outcomes per step");
  if (horizon < 0 || horizon > 8) throw InputError("optional stopping audit: horizon must lie in [0,8]");
  const FiniteDistribution& p = stream.null_step;
  // value(state) = max(stop now, continue); the root always takes one step
  std::function<double(const EProcessState&)> best = [&](const EProcessState& s) -> double {
    if (static_cast<int>(s.t) == horizon) return s.wealth;
    const StepTest step = strategy(s);
    if (step.factors.size() != p.size()) throw ModelMismatch("strategy factor table has the wrong length");
    double cont = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      cont += p[i] * best(update(s, step.factors[i], step.level));
    }
    return s.t == 0 ? cont : std::max(s.wealth, cont);
  };
  return best(EProcessState::start(target));
}

SimulationSummary simulate(const StreamModel& stream, const Strategy& strategy,
                           const SimulationOptions& options) {
  stream.validate();
  if (options.paths < 1000) throw InputError("simulate needs at least 1000 paths");
  if (options.horizon < 0) throw InputError("horizon must be >= 0");

  std::vector<PathResult> results(options.paths);
  const unsigned workers = std::max(1u, options.workers);
  auto shard = [&](unsigned w) {
    for (std::size_t k = w; k < options.paths; k += workers)
      results[k] = run_path(stream, strategy, options, k);
  };
  if (workers == 1) {
    shard(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(shard, w);
    for (auto& th : pool) th.join();
  }

  SimulationSummary s;
  s.paths = options.paths;
  s.horizon = options.horizon;
  const double n = static_cast<double>(options.paths);
  std::size_t crossings = 0;
  std::vector<double> terminal;
  terminal.reserve(options.paths);
  double log_sum = 0.0;
  double log_sq = 0.0;
  bool absorbed = false;
  for (auto& r : results) {
    crossings += r.crossed ? 1 : 0;
    s.max_wealth = std::max(s.max_wealth, r.peak);
    terminal.push_back(r.terminal);
    if (r.terminal <= 0.0) {
      absorbed = true;
    } else {
      const double l = std::log(r.terminal);
      log_sum += l;
      log_sq += l * l;
    }
    if (options.keep_paths) s.wealth_paths.push_back(std::move(r.wealth));
  }
  s.crossing_frequency = static_cast<double>(crossings) / n;
  s.crossing_se = std::sqrt(s.crossing_frequency * (1.0 - s.crossing_frequency) / n);
  std::sort(terminal.begin(), terminal.end());
  s.quantile_levels = {0.05, 0.25, 0.5, 0.75, 0.95};
  for (double lv : s.quantile_levels) s.terminal_quantiles.push_back(empirical_quantile(terminal, lv));
  if (absorbed) {
    s.mean_log_growth = -kInf;
    s.log_growth_se = kInf;
  } else {
    s.mean_log_growth = log_sum / n;
    const double var = std::max(0.0, (log_sq - n * s.mean_log_growth * s.mean_log_growth) / (n - 1.0));
    s.log_growth_se = std::sqrt(var / n);
  }
  return s;
}

}  // namespace etest
