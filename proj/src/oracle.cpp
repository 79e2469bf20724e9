#include "ldfm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ldfm/error.hpp"

namespace ldfm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_oracle_size(std::size_t n) {
  if (n < 1 || n > kMaxOracleNodes)
    throw std::invalid_argument("tree enumeration needs 1 <= n <= " +
                                std::to_string(kMaxOracleNodes) + ", got " + std::to_string(n));
}

double tree_log_weight(const AssignmentGraph& graph, const ParentVector& tree) {
  double total = 0.0;
  for (std::size_t j = 1; j <= graph.n(); ++j)
    total += std::log(graph.weight(static_cast<std::size_t>(tree.parent[j]), j));
  return total;
}

// Log weights of every tree, in enumeration order, plus their maximum.
struct TreeWeights {
  std::vector<ParentVector> trees;
  std::vector<double> log_w;
  double max_log_w = kNegInf;
};

TreeWeights weigh_trees(const AssignmentGraph& graph) {
  TreeWeights out;
  for_each_rooted_tree(graph.n(), [&](const ParentVector& tree) {
    const double lw = tree_log_weight(graph, tree);
    out.trees.push_back(tree);
    out.log_w.push_back(lw);
    out.max_log_w = std::max(out.max_log_w, lw);
  });
  if (out.max_log_w == kNegInf) throw SingularLaplacian("every spanning tree has zero weight");
  return out;
}

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

// Calls visit(x) for every complete assignment agreeing with `fixed`.
void for_each_completion(const VariableSchema& schema, const Assignment& fixed,
                         const std::function<void(const Assignment&)>& visit) {
  Assignment x(schema.size(), 0);
  std::vector<std::size_t> free_vars;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (fixed.is_set(i))
      x[i] = fixed[i];
    else
      free_vars.push_back(i);
  }
  while (true) {
    visit(x);
    std::size_t k = free_vars.size();
    while (k > 0) {
      const std::size_t v = free_vars[k - 1];
      if (static_cast<std::size_t>(++x[v]) < schema.cardinality(v)) break;
      x[v] = 0;
      --k;
    }
    if (k == 0) return;
  }
}

void check_state_space(const LdfmModel& model) {
  const VariableSchema& schema = model.schema();
  check_oracle_size(schema.size());
  if (schema.state_space_size() > kMaxOracleStates)
    throw std::invalid_argument("state space too large for exact enumeration");
}

double joint_or_zero(const LdfmModel& model, const Assignment& x) {
  try {
    return brute_unnormalized_joint(model, x);
  } catch (const SingularLaplacian&) {
    return kNegInf;
  }
}

}  // namespace

void for_each_rooted_tree(std::size_t n, const std::function<void(const ParentVector&)>& visit) {
  check_oracle_size(n);
  // Each node j picks a parent from {0..n} \ {j}; digit d maps to d, or d+1
  // once d reaches j.
  std::vector<std::size_t> digit(n + 1, 0);
  ParentVector tree(n);
  while (true) {
    for (std::size_t j = 1; j <= n; ++j)
      tree.parent[j] = static_cast<int>(digit[j] < j ? digit[j] : digit[j] + 1);
    if (is_rooted_tree(tree)) visit(tree);
    std::size_t j = n;
    while (j >= 1) {
      if (++digit[j] < n) break;
      digit[j] = 0;
      --j;
    }
    if (j == 0) return;
  }
}

std::vector<ParentVector> enumerate_rooted_trees(std::size_t n) {
  std::vector<ParentVector> trees;
  for_each_rooted_tree(n, [&](const ParentVector& t) { trees.push_back(t); });
  return trees;
}

LogPartition brute_log_partition(const AssignmentGraph& graph) {
  const TreeWeights tw = weigh_trees(graph);
  return LogPartition{log_sum_exp(tw.log_w), 1};
}

EdgePosteriors brute_edge_posteriors(const AssignmentGraph& graph) {
  const TreeWeights tw = weigh_trees(graph);
  const std::size_t n = graph.n();
  EdgePosteriors mass(n);
  double total = 0.0;
  for (std::size_t t = 0; t < tw.trees.size(); ++t) {
    const double w = std::exp(tw.log_w[t] - tw.max_log_w);
    total += w;
    for (std::size_t j = 1; j <= n; ++j)
      mass(static_cast<std::size_t>(tw.trees[t].parent[j]), j) += w;
  }
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) mass(i, j) /= total;
  return mass;
}

double brute_unnormalized_joint(const LdfmModel& model, const Assignment& x) {
  const double stops = log_stop_product(model, x);
  if (stops == kNegInf) throw SingularLaplacian("assignment has a zero stop weight");
  return brute_log_partition(make_assignment_graph(model, x)).log_z + stops;
}

double brute_valid_normalizer(const LdfmModel& model) {
  check_state_space(model);
  std::vector<double> joints;
  for_each_completion(model.schema(), Assignment(model.schema().size()),
                      [&](const Assignment& x) { joints.push_back(joint_or_zero(model, x)); });
  const double log_gamma = log_sum_exp(joints);
  if (log_gamma == kNegInf) throw NumericError("every assignment has zero probability");
  return log_gamma;
}

std::vector<std::pair<Assignment, double>> exact_posterior(const LdfmModel& model,
                                                           const Assignment& evidence) {
  check_state_space(model);
  check_assignment(model.schema(), evidence, /*require_complete=*/false);
  std::vector<Assignment> xs;
  std::vector<double> joints;
  for_each_completion(model.schema(), evidence, [&](const Assignment& x) {
    xs.push_back(x);
    joints.push_back(joint_or_zero(model, x));
  });
  const double log_norm = log_sum_exp(joints);
  if (log_norm == kNegInf) throw NumericError("evidence has zero probability");
  std::vector<std::pair<Assignment, double>> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k)
    out.emplace_back(std::move(xs[k]), std::exp(joints[k] - log_norm));
  return out;
}

double exact_conditional(const LdfmModel& model, const Assignment& query,
                         const Assignment& evidence) {
  check_assignment(model.schema(), query, /*require_complete=*/false);
  for (std::size_t i = 0; i < query.size(); ++i)
    if (query.is_set(i) && evidence.is_set(i))
      throw std::invalid_argument("query and evidence overlap on '" +
                                  model.schema().variable(i).name + "'");
  double p = 0.0;
  for (const auto& [x, prob] : exact_posterior(model, evidence)) {
    bool match = true;
    for (std::size_t i = 0; i < query.size() && match; ++i)
      match = !query.is_set(i) || query[i] == x[i];
    if (match) p += prob;
  }
  return p;
}

}  // namespace ldfm
