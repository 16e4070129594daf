#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "etest/evidence.hpp"

namespace etest {

double e_to_continuous(double e, double alpha);
// 1/alpha when alpha * e >= 1, otherwise 0.
double e_to_binary(double e, double alpha);
bool randomize(double epsilon, double alpha, double u);

// Nested binary rejection rule over levels: either "reject iff alpha >= threshold"
// or explicit decisions on an increasing grid of levels.
class PValueFamily {
 public:
  static PValueFamily threshold(double p0);
  static PValueFamily never();
  static PValueFamily grid(std::vector<double> alphas, std::vector<bool> rejects);

  bool rejects(double alpha) const;
  bool is_threshold() const { return threshold_form_; }
  double threshold_value() const { return p0_; }
  const std::vector<double>& grid_levels() const { return alphas_; }
  const std::vector<bool>& grid_decisions() const { return rejects_; }

 private:
  PValueFamily() = default;

  bool threshold_form_ = true;
  double p0_ = std::numeric_limits<double>::infinity();
  std::vector<double> alphas_;
  std::vector<bool> rejects_;
};

struct PValueReading {
  double p;
  double sup_evidence;    // sup over levels of the binary test value
  bool identity_holds;    // p == 1 / sup_evidence
};

PValueReading p_from_family(const PValueFamily& family);

double strong_p(double epsilon);

struct MarkovChain {
  double indicator;  // 1{alpha x >= 1}
  double floor;      // floor(min(alpha x, 1))
  double minimum;    // min(alpha x, 1)
  double product;    // alpha x
  bool ordered;
  // sup over levels of 1{alpha x >= 1}/alpha, attained at alpha = 1/x.
  double markov_equality;
};

MarkovChain markov_chain_values(double x, double alpha);

struct LevelExceedance {
  double alpha;
  double frequency;
  double standard_error;
  bool flagged;
};

using Sampler = std::function<double(std::mt19937_64&)>;

std::vector<LevelExceedance> weak_p_audit(const Sampler& p_sampler, const std::vector<double>& alphas,
                                          std::size_t n, std::uint64_t seed);

struct CrossLevelAudit {
  double raw_estimate;      // E[1{reject at 1/eps} / (1/eps)]
  double raw_se;
  double reduced_estimate;  // E[eps]
  double reduced_se;
  bool flagged;
};

// Draws eps from the sampler, reads it at level min(1, 1/eps) and rejects
// with probability min(1, eps * level).
CrossLevelAudit cross_level_audit(const Sampler& epsilon_sampler, std::size_t n, std::uint64_t seed);
CrossLevelAudit cross_level_audit(const ContinuousTest& test, const NullModel& null, std::size_t n,
                                  std::uint64_t seed);

}  // namespace etest
