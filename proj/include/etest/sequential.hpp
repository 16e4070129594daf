#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "etest/evidence.hpp"
#include "etest/measure.hpp"
#include "etest/utility.hpp"

namespace etest {

struct EProcessState {
  std::size_t t = 0;
  double wealth = 1.0;
  Level target{0.0};
  std::vector<double> factors;
  std::vector<double> levels;

  static EProcessState start(Level target) { return EProcessState{0, 1.0, target, {}, {}}; }
};

// Multiplies the wealth by one realized factor.  Products that overshoot the
// target cap by rounding only are pulled back onto it.
EProcessState update(const EProcessState& state, double factor, double step_level = 1.0);

// I.i.d. steps drawn from a finite null or alternative law.
struct StreamModel {
  FiniteDistribution null_step;
  FiniteDistribution alternative_step;

  void validate() const { require_same_space(null_step, alternative_step); }
};

struct StepTest {
  std::vector<double> factors;  // one per step outcome
  double level = 1.0;
};

// Picks the next step's factor table from the current state.
using Strategy = std::function<StepTest(const EProcessState&)>;

// Level alpha * M capped at 1, and the optimal simple test at that level.
StepTest fischer_step(const EProcessState& state, const StreamModel& stream, const Utility& utility);

Strategy fischer_strategy(const StreamModel& stream, const Utility& utility);
// Uncapped per-step likelihood ratio (the level-0 log-optimal step).
Strategy likelihood_ratio_strategy(const StreamModel& stream);
Strategy constant_strategy(std::vector<double> factors);

// sup over stopping times 1 <= tau <= horizon of E_null[M_tau] on the full outcome tree.
double optional_stopping_audit(const StreamModel& stream, const Strategy& strategy, int horizon,
                               Level target = Level(0.0));

enum class Regime { null, alternative };

struct SimulationOptions {
  std::size_t paths = 1000;
  int horizon = 10;
  Regime regime = Regime::null;
  Level target{0.1};
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool keep_paths = false;
};

struct SimulationSummary {
  std::size_t paths = 0;
  int horizon = 0;
  double crossing_frequency = 0.0;
  double crossing_se = 0.0;
  double max_wealth = 0.0;
  std::vector<double> quantile_levels;
  std::vector<double> terminal_quantiles;
  double mean_log_growth = 0.0;
  double log_growth_se = 0.0;
  std::vector<std::vector<double>> wealth_paths;  // filled when keep_paths
};

SimulationSummary simulate(const StreamModel& stream, const Strategy& strategy,
                           const SimulationOptions& options);

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

}  // namespace etest
