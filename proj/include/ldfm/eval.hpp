#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ldfm/dataset.hpp"
#include "ldfm/mcmc.hpp"
#include "ldfm/model.hpp"

namespace ldfm {

struct SplitSizes {
  std::size_t query = 0;
  std::size_t evidence = 0;
  std::size_t hidden = 0;
};

/// |Q| = round(q_frac n) but at least 1, |E| = round(e_frac n) capped so
/// that |Q| + |E| <= n, the rest hidden. Throws std::invalid_argument when
/// q_frac <= 0, e_frac < 0 or q_frac + e_frac > 1.
SplitSizes split_sizes(std::size_t n, double q_frac, double e_frac);

/// `count` instances over the rows of `test`, visited in a seeded random
/// order and reused cyclically. Each instance gets its own random Q/E/H
/// partition and takes q and e from its row.
std::vector<QueryInstance> make_query_instances(const Dataset& test, double q_frac, double e_frac,
                                                std::size_t count, std::uint64_t seed);

/// Per-instance scores, already divided by |Q|.
struct InstanceScore {
  double cll = 0.0;
  double cmll = 0.0;
  double best = 0.0;  // max(cll, cmll)
};

struct EvalReport {
  std::vector<InstanceScore> per_instance;
  double q_frac = 0.0;
  double e_frac = 0.0;
  double mean_cll = 0.0;
  double mean_cmll = 0.0;
  double mean_max = 0.0;
  double seconds_train = 0.0;
  double seconds_infer = 0.0;
  SamplerConfig sampler;
};

/// Fills the three means from per_instance.
void finalize_means(EvalReport& report);

/// run_chain plus both estimators for every instance. Instance k draws its
/// chains from seed derive_seed(config.seed, k), so the report does not
/// depend on `workers`.
EvalReport evaluate(const LdfmModel& model, std::span<const QueryInstance> instances,
                    const SamplerConfig& config, std::size_t workers = 0);

/// Per-variable empirical marginals with add-one smoothing. Query variables
/// are independent of evidence under it, so CLL and CMLL coincide and no
/// sampling is needed.
class IndependenceBaseline {
 public:
  static IndependenceBaseline fit(const Dataset& train);
  double log_marginal(std::size_t var, std::size_t value) const {
    return log_marginals_[var][value];
  }

 private:
  std::vector<std::vector<double>> log_marginals_;
};

EvalReport evaluate_baseline(const IndependenceBaseline& baseline,
                             std::span<const QueryInstance> instances);

/// `key: value` lines with exactly the fields instances, q_frac, e_frac,
/// mean_cll, mean_cmll, mean_max, seconds_train, seconds_infer.
std::string format_report(const EvalReport& report);

}  // namespace ldfm
