#include "ldfm/mcmc.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldfm/error.hpp"
#include "ldfm/matrix_tree.hpp"

namespace ldfm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double w) { return w > 0.0 ? std::log(w) : kNegInf; }

double joint_or_zero(const LdfmModel& model, const Assignment& x) {
  try {
    return log_unnormalized_joint(model, x);
  } catch (const SingularLaplacian&) {
    return kNegInf;
  }
}

// Source index of graph node j under the current values (0 for ROOT).
std::size_t node_source(const LdfmModel& model, const Assignment& values, std::size_t j) {
  return j == 0 ? 0 : model.source_of(j - 1, static_cast<std::size_t>(values[j - 1]));
}

}  // namespace

std::vector<std::size_t> QueryInstance::query_variables() const {
  std::vector<std::size_t> vars;
  for (std::size_t i = 0; i < query.size(); ++i)
    if (query.is_set(i)) vars.push_back(i);
  return vars;
}

void validate_instance(const VariableSchema& schema, const QueryInstance& instance) {
  check_assignment(schema, instance.evidence, /*require_complete=*/false);
  check_assignment(schema, instance.query, /*require_complete=*/false);
  std::vector<int> seen(schema.size(), 0);
  for (std::size_t i = 0; i < schema.size(); ++i)
    seen[i] += instance.evidence.is_set(i) + instance.query.is_set(i);
  for (std::size_t h : instance.hidden) {
    if (h >= schema.size()) throw std::out_of_range("hidden variable index out of range");
    ++seen[h];
  }
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (seen[i] != 1)
      throw std::invalid_argument("variable '" + schema.variable(i).name +
                                  "' is not in exactly one of query, evidence, hidden");
}

std::string_view to_string(SamplerKind kind) {
  return kind == SamplerKind::kGibbs ? "gibbs" : "tree";
}

SamplerKind parse_sampler(std::string_view text) {
  if (text == "gibbs") return SamplerKind::kGibbs;
  if (text == "tree") return SamplerKind::kTreeAugmented;
  throw std::invalid_argument("unknown sampler '" + std::string(text) + "'");
}

void SamplerConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("samples must be at least 1");
  if (thin < 1) throw std::invalid_argument("thin must be at least 1");
  if (chains < 1) throw std::invalid_argument("chains must be at least 1");
}

std::size_t SamplerConfig::burn_in_for(std::size_t n) const {
  if (burn_in) return *burn_in;
  return sampler == SamplerKind::kGibbs ? 10 * n : 100 * n;
}

ParentVector random_rooted_tree(std::size_t n, Rng& rng) {
  ParentVector tree(n);
  std::vector<char> in_tree(n + 1, 0);
  in_tree[0] = 1;
  for (std::size_t start = 1; start <= n; ++start) {
    // Loop-erased random walk: overwriting parent[u] on revisits erases loops.
    for (std::size_t u = start; !in_tree[u];) {
      std::size_t next = rng.below(n);
      if (next >= u) ++next;
      tree.parent[u] = static_cast<int>(next);
      u = next;
    }
    for (std::size_t u = start; !in_tree[u]; u = static_cast<std::size_t>(tree.parent[u]))
      in_tree[u] = 1;
  }
  return tree;
}

ChainState init_chain(const LdfmModel& model, const Assignment& evidence, SamplerKind kind,
                      Rng rng) {
  const VariableSchema& schema = model.schema();
  check_assignment(schema, evidence, /*require_complete=*/false);
  ChainState state{Assignment(schema.size()), std::vector<char>(schema.size(), 0), {},
                   std::move(rng)};
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (evidence.is_set(i)) {
      state.values[i] = evidence[i];
      state.pinned[i] = 1;
    } else {
      state.values[i] = static_cast<int>(state.rng.below(schema.cardinality(i)));
    }
  }
  if (kind == SamplerKind::kTreeAugmented) state.parents = random_rooted_tree(schema.size(), state.rng);
  return state;
}

void gibbs_sweep(const LdfmModel& model, ChainState& state) {
  const VariableSchema& schema = model.schema();
  std::vector<double> log_w;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (state.pinned[i]) continue;
    log_w.assign(schema.cardinality(i), kNegInf);
    for (std::size_t v = 0; v < log_w.size(); ++v) {
      state.values[i] = static_cast<int>(v);
      log_w[v] = joint_or_zero(model, state.values);
    }
    const std::size_t pick = state.rng.categorical_log(log_w);
    if (pick == log_w.size())
      throw NumericError("every value of '" + schema.variable(i).name +
                         "' has zero probability given the rest");
    state.values[i] = static_cast<int>(pick);
  }
  ++state.steps;
  ++state.accepted;
}

void tree_augmented_step(const LdfmModel& model, ChainState& state, TreeMove move) {
  const VariableSchema& schema = model.schema();
  const std::size_t n = schema.size();
  const std::size_t node = state.rng.below(n) + 1;
  const std::size_t var = node - 1;
  const std::vector<char> excluded = subtree_mask(state.parents, node);

  std::vector<std::size_t> values;
  if (state.pinned[var]) {
    values.push_back(static_cast<std::size_t>(state.values[var]));
  } else {
    for (std::size_t v = 0; v < schema.cardinality(var); ++v) values.push_back(v);
  }
  std::vector<std::size_t> parents;
  for (std::size_t j = 0; j <= n; ++j)
    if (!excluded[j]) parents.push_back(j);

  // Factors that depend on the node's value but not on its parent: edges to
  // its children, and its own stop weight.
  std::vector<double> log_children(values.size(), 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t src = model.source_of(var, values[k]);
    double lc = model.has_stop() ? safe_log(model.stop(src)) : 0.0;
    for (std::size_t c = 1; c <= n; ++c)
      if (state.parents.parent[c] == static_cast<int>(node))
        lc += safe_log(model.dep(src, node_source(model, state.values, c) - 1));
    log_children[k] = lc;
  }

  std::vector<double> log_w(values.size() * parents.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::size_t target = schema.pair_index(var, values[k]);
    for (std::size_t p = 0; p < parents.size(); ++p) {
      const double incoming = safe_log(model.dep(node_source(model, state.values, parents[p]), target));
      log_w[k * parents.size() + p] =
          move == TreeMove::kFullConditional ? incoming + log_children[k] : incoming;
    }
  }
  const std::size_t pick = state.rng.categorical_log(log_w);
  if (pick == log_w.size())
    throw NumericError("no admissible (value, parent) move for '" + schema.variable(var).name + "'");
  const std::size_t k = pick / parents.size();

  bool accept = true;
  if (move == TreeMove::kIncomingProposal) {
    std::size_t current = 0;
    while (values[current] != static_cast<std::size_t>(state.values[var])) ++current;
    const double log_ratio = log_children[k] - log_children[current];
    accept = log_children[current] == kNegInf || log_ratio >= 0.0 ||
             state.rng.uniform() < std::exp(log_ratio);
  }
  if (accept) {
    state.values[var] = static_cast<int>(values[k]);
    state.parents.parent[node] = static_cast<int>(parents[pick % parents.size()]);
    ++state.accepted;
  }
  ++state.steps;
  assert(is_rooted_tree(state.parents));
}

std::vector<Assignment> run_chain(const LdfmModel& model, const QueryInstance& instance,
                                  const SamplerConfig& config) {
  config.validate();
  validate_instance(model.schema(), instance);
  const std::size_t burn_in = config.burn_in_for(model.schema().size());
  std::vector<Assignment> out;
  out.reserve(config.samples * config.chains);
  for (std::size_t c = 0; c < config.chains; ++c) {
    ChainState state = init_chain(model, instance.evidence, config.sampler, Rng(config.seed, c));
    auto advance = [&] {
      if (config.sampler == SamplerKind::kGibbs)
        gibbs_sweep(model, state);
      else
        tree_augmented_step(model, state, config.tree_move);
    };
    for (std::size_t b = 0; b < burn_in; ++b) advance();
    for (std::size_t s = 0; s < config.samples; ++s) {
      for (std::size_t t = 0; t < config.thin; ++t) advance();
      out.push_back(state.values);
    }
  }
  return out;
}

namespace {

void check_estimator_input(std::span<const Assignment> samples, const QueryInstance& instance) {
  if (samples.empty()) throw std::invalid_argument("no samples to estimate from");
  if (instance.query_variables().empty()) throw std::invalid_argument("query has no variables");
}

}  // namespace

double estimate_cll(std::span<const Assignment> samples, const QueryInstance& instance) {
  check_estimator_input(samples, instance);
  const std::vector<std::size_t> q = instance.query_variables();
  std::size_t matches = 0;
  for (const Assignment& x : samples) {
    bool all = true;
    for (std::size_t i : q) all = all && x[i] == instance.query[i];
    matches += all;
  }
  return std::log((static_cast<double>(matches) + 1.0) /
                  (static_cast<double>(samples.size()) + 2.0));
}

double estimate_cmll(std::span<const Assignment> samples, const QueryInstance& instance,
                     const VariableSchema& schema) {
  check_estimator_input(samples, instance);
  double total = 0.0;
  for (std::size_t i : instance.query_variables()) {
    std::size_t matches = 0;
    for (const Assignment& x : samples) matches += x[i] == instance.query[i];
    total += std::log((static_cast<double>(matches) + 1.0) /
                      static_cast<double>(samples.size() + schema.cardinality(i)));
  }
  return total;
}

double normalized_cll(std::span<const Assignment> samples, const QueryInstance& instance) {
  return estimate_cll(samples, instance) / static_cast<double>(instance.query_variables().size());
}

double normalized_cmll(std::span<const Assignment> samples, const QueryInstance& instance,
                       const VariableSchema& schema) {
  return estimate_cmll(samples, instance, schema) /
         static_cast<double>(instance.query_variables().size());
}

}  // namespace ldfm
