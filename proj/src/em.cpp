#include "ldfm/em.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldfm/error.hpp"
#include "ldfm/matrix_tree.hpp"
#include "ldfm/parallel.hpp"

namespace ldfm {

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
  if (other.num_sources != num_sources || other.num_targets != num_targets)
    throw std::invalid_argument("sufficient statistics have different shapes");
  for (std::size_t k = 0; k < edge_count.size(); ++k) edge_count[k] += other.edge_count[k];
  for (std::size_t k = 0; k < occur_count.size(); ++k) occur_count[k] += other.occur_count[k];
  sample_count += other.sample_count;
  log_likelihood += other.log_likelihood;
  return *this;
}

std::string_view to_string(Smoothing smoothing) {
  switch (smoothing) {
    case Smoothing::kNone: return "none";
    case Smoothing::kAdditive: return "additive";
    case Smoothing::kSparsity: return "sparsity";
  }
  return "none";
}

Smoothing parse_smoothing(std::string_view text) {
  if (text == "none") return Smoothing::kNone;
  if (text == "additive") return Smoothing::kAdditive;
  if (text == "sparsity") return Smoothing::kSparsity;
  throw std::invalid_argument("unknown smoothing '" + std::string(text) + "'");
}

void TrainConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be nonnegative");
  if (!(rel_tol >= 0.0)) throw std::invalid_argument("rel_tol must be nonnegative");
}

namespace {

// Upper bound on the number of partial statistics kept alive during the
// E-step. The chunking depends only on the dataset size, so the reduction
// order (and therefore every bit of the result) is independent of the
// number of workers.
constexpr std::size_t kMaxChunks = 64;

void accumulate_sample(const LdfmModel& model, const Assignment& x, std::size_t index,
                       SufficientStats& stats) {
  const std::size_t n = x.size();
  TreeMarginals marginals = [&] {
    try {
      return tree_marginals(make_assignment_graph(model, x));
    } catch (const SingularLaplacian& e) {
      throw SingularLaplacian("sample " + std::to_string(index) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw DataError("sample " + std::to_string(index) + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw DataError("sample " + std::to_string(index) + ": " + e.what());
    }
  }();
  std::vector<std::size_t> source(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) source[v + 1] = model.source_of(v, static_cast<std::size_t>(x[v]));
  for (std::size_t i = 0; i <= n; ++i) {
    stats.occur_count[source[i]] += 1.0;
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) stats.edge(source[i], source[j] - 1) += marginals.posteriors(i, j);
  }
  stats.sample_count += 1;
  stats.log_likelihood += marginals.partition.log_z + log_stop_product(model, x);
}

template <class PerSample>
void for_each_chunk(std::size_t count, std::size_t workers, std::vector<SufficientStats>& parts,
                    PerSample&& per_sample) {
  const std::size_t chunks = parts.size();
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    for (std::size_t a = begin; a < end; ++a) per_sample(a, parts[c]);
  });
}

// Smoothed numerator for one outcome count.
double smoothed(double count, const TrainConfig& config) {
  switch (config.smoothing) {
    case Smoothing::kNone: return count;
    case Smoothing::kAdditive: return count + config.eps;
    case Smoothing::kSparsity: return std::max(count - config.kappa, kWeightFloor);
  }
  return count;
}

void set_uniform_row(LdfmModel& model, std::size_t s) {
  std::size_t outcomes = model.has_stop() ? 1 : 0;
  for (std::size_t t = 0; t < model.num_targets(); ++t) outcomes += model.is_legal(s, t);
  const double w = 1.0 / static_cast<double>(outcomes);
  for (std::size_t t = 0; t < model.num_targets(); ++t)
    model.dep(s, t) = model.is_legal(s, t) ? w : 0.0;
  if (model.has_stop()) model.set_stop(s, w);
}

// Floors every outcome of row s at kWeightFloor, then renormalizes.
void floor_row(LdfmModel& model, std::size_t s) {
  double total = 0.0;
  for (std::size_t t = 0; t < model.num_targets(); ++t) {
    if (!model.is_legal(s, t)) continue;
    model.dep(s, t) = std::max(model.dep(s, t), kWeightFloor);
    total += model.dep(s, t);
  }
  if (model.has_stop()) {
    model.set_stop(s, std::max(model.stop(s), kWeightFloor));
    total += model.stop(s);
  }
  for (std::size_t t = 0; t < model.num_targets(); ++t)
    if (model.is_legal(s, t)) model.dep(s, t) /= total;
  if (model.has_stop()) model.set_stop(s, model.stop(s) / total);
}

}  // namespace

SufficientStats e_step(const LdfmModel& model, std::span<const Assignment> data,
                       std::size_t workers) {
  SufficientStats total(model);
  if (data.empty()) return total;
  std::vector<SufficientStats> parts(std::min(kMaxChunks, data.size()), total);
  for_each_chunk(data.size(), workers, parts, [&](std::size_t a, SufficientStats& part) {
    accumulate_sample(model, data[a], a, part);
  });
  for (const auto& p : parts) total += p;
  return total;
}

LdfmModel m_step(const SufficientStats& stats, const TrainConfig& config,
                 const VariableSchema& schema) {
  config.validate();
  if (stats.sample_count == 0) throw std::invalid_argument("m_step needs statistics from at least one sample");
  LdfmModel model(schema, config.variant);
  if (stats.num_sources != model.num_sources() || stats.num_targets != model.num_targets())
    throw std::invalid_argument("statistics do not match the schema");
  for (std::size_t s = 0; s < model.num_sources(); ++s) {
    const double occurrences = stats.occur_count[s];
    if (occurrences <= 0.0) {
      set_uniform_row(model, s);
      continue;
    }
    double total = 0.0;
    for (std::size_t t = 0; t < model.num_targets(); ++t) {
      if (!model.is_legal(s, t)) continue;
      model.dep(s, t) = smoothed(stats.edge(s, t), config);
      total += model.dep(s, t);
    }
    if (model.has_stop()) {
      // Every node stops exactly once per tree, so the expected stop count of
      // key s is the number of samples containing it.
      model.set_stop(s, smoothed(occurrences, config));
      total += model.stop(s);
    }
    if (!(total > 0.0)) {
      set_uniform_row(model, s);
      continue;
    }
    for (std::size_t t = 0; t < model.num_targets(); ++t)
      if (model.is_legal(s, t)) model.dep(s, t) /= total;
    if (model.has_stop()) model.set_stop(s, model.stop(s) / total);
    floor_row(model, s);
  }
  return model;
}

double data_log_likelihood(const LdfmModel& model, std::span<const Assignment> data,
                           std::size_t workers) {
  const std::size_t chunks = std::min(kMaxChunks, data.size());
  std::vector<double> partial(chunks, 0.0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::size_t begin = data.size() * c / chunks;
    const std::size_t end = data.size() * (c + 1) / chunks;
    for (std::size_t a = begin; a < end; ++a) {
      try {
        partial[c] += log_unnormalized_joint(model, data[a]);
      } catch (const SingularLaplacian& e) {
        throw SingularLaplacian("sample " + std::to_string(a) + ": " + e.what());
      }
    }
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double log_prior(const LdfmModel& model, const TrainConfig& config) {
  double exponent = 0.0;
  switch (config.smoothing) {
    case Smoothing::kNone: return 0.0;
    case Smoothing::kAdditive: exponent = config.eps; break;
    case Smoothing::kSparsity: exponent = -config.kappa; break;
  }
  if (exponent == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t s = 0; s < model.num_sources(); ++s) {
    for (std::size_t t = 0; t < model.num_targets(); ++t)
      if (model.is_legal(s, t)) sum += std::log(model.dep(s, t));
    if (model.has_stop()) sum += std::log(model.stop(s));
  }
  return exponent * sum;
}

TrainResult train_em(std::span<const Assignment> data, const VariableSchema& schema,
                     const TrainConfig& config, const ProgressFn& progress) {
  config.validate();
  if (data.empty()) throw std::invalid_argument("training data is empty");
  for (std::size_t a = 0; a < data.size(); ++a) {
    try {
      check_assignment(schema, data[a], /*require_complete=*/true);
    } catch (const std::exception& e) {
      throw DataError("sample " + std::to_string(a) + ": " + e.what());
    }
  }

  TrainResult result{make_uniform_model(schema, config.variant), {}};
  SufficientStats stats = e_step(result.model, data, config.workers);
  auto record = [&](std::size_t iteration) {
    IterationRecord r;
    r.iteration = iteration;
    r.log_likelihood = stats.log_likelihood;
    r.log_prior = log_prior(result.model, config);
    r.objective = r.log_likelihood + r.log_prior;
    r.delta = result.trace.empty() ? 0.0 : r.log_likelihood - result.trace.back().log_likelihood;
    result.trace.push_back(r);
    if (progress) progress(r);
  };
  record(0);

  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    result.model = m_step(stats, config, schema);
    stats = e_step(result.model, data, config.workers);
    const double previous = result.trace.back().objective;
    record(it);
    const double gain = result.trace.back().objective - previous;
    if (gain < config.rel_tol * std::abs(previous)) break;
  }
  return result;
}

std::string format_progress(const IterationRecord& record) {
  std::ostringstream out;
  out.precision(10);
  out << "iter=" << record.iteration << " ll=" << record.log_likelihood
      << " dll=" << record.delta;
  return out.str();
}

}  // namespace ldfm
