#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ldfm/model.hpp"

namespace ldfm {

/// E-step output. edge_count(s, t) accumulates, over samples whose nodes
/// carry keys s and t, the posterior probability of edge s -> t (already
/// divided by Z). occur_count(s) counts samples containing key s; ROOT
/// occurs in every sample.
struct SufficientStats {
  SufficientStats(std::size_t num_sources, std::size_t num_targets)
      : num_sources(num_sources),
        num_targets(num_targets),
        edge_count(num_sources * num_targets, 0.0),
        occur_count(num_sources, 0.0) {}
  explicit SufficientStats(const LdfmModel& model)
      : SufficientStats(model.num_sources(), model.num_targets()) {}

  double edge(std::size_t source, std::size_t target) const {
    return edge_count[source * num_targets + target];
  }
  double& edge(std::size_t source, std::size_t target) {
    return edge_count[source * num_targets + target];
  }

  SufficientStats& operator+=(const SufficientStats& other);

  std::size_t num_sources;
  std::size_t num_targets;
  std::vector<double> edge_count;
  std::vector<double> occur_count;
  std::size_t sample_count = 0;
  // Σ log Z (plus stop terms for the stop variant) under the model that
  // produced these statistics.
  double log_likelihood = 0.0;
};

enum class Smoothing {
  kNone,
  kAdditive,  // Laplace: count + eps
  kSparsity,  // discounting: max(count - kappa, tiny); stands in for the modified Dirichlet prior
};

std::string_view to_string(Smoothing smoothing);
Smoothing parse_smoothing(std::string_view text);

struct TrainConfig {
  std::size_t max_iters = 100;
  double rel_tol = 1e-5;
  Smoothing smoothing = Smoothing::kAdditive;
  double eps = 0.1;
  double kappa = 0.0;
  Variant variant = Variant::kPlain;
  std::uint64_t seed = 0;  // reserved for restarts; EM itself is deterministic
  std::size_t workers = 0;

  // Throws std::invalid_argument on max_iters == 0 or negative eps/kappa.
  void validate() const;
};

/// Weights are floored here after every M-step, then renormalized.
inline constexpr double kWeightFloor = 1e-12;

SufficientStats e_step(const LdfmModel& model, std::span<const Assignment> data,
                       std::size_t workers = 0);

LdfmModel m_step(const SufficientStats& stats, const TrainConfig& config,
                 const VariableSchema& schema);

double data_log_likelihood(const LdfmModel& model, std::span<const Assignment> data,
                           std::size_t workers = 0);

/// Log density of the smoothing prior at `model` (up to a constant): eps Σ log w
/// for additive smoothing, -kappa Σ log w for sparsity, 0 otherwise.
double log_prior(const LdfmModel& model, const TrainConfig& config);

struct IterationRecord {
  std::size_t iteration = 0;
  double log_likelihood = 0.0;
  double log_prior = 0.0;
  double objective = 0.0;  // log_likelihood + log_prior
  double delta = 0.0;      // change in log_likelihood from the previous record
};

struct TrainResult {
  LdfmModel model;
  std::vector<IterationRecord> trace;  // initial model first
};

using ProgressFn = std::function<void(const IterationRecord&)>;

/// EM from the uniform model. Stops after max_iters rounds or once the
/// relative objective improvement drops below rel_tol.
TrainResult train_em(std::span<const Assignment> data, const VariableSchema& schema,
                     const TrainConfig& config, const ProgressFn& progress = {});

/// "iter=<k> ll=<float> dll=<float>"
std::string format_progress(const IterationRecord& record);

}  // namespace ldfm
