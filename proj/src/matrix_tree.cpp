#include "ldfm/matrix_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldfm/error.hpp"

namespace ldfm {

AssignmentGraph make_assignment_graph(const LdfmModel& model, const Assignment& x) {
  check_assignment(model.schema(), x, /*require_complete=*/true);
  const std::size_t n = x.size();
  AssignmentGraph graph(n);
  std::vector<std::size_t> node_source(n + 1, 0);
  std::vector<std::size_t> node_target(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) {
    node_source[v + 1] = model.source_of(v, static_cast<std::size_t>(x[v]));
    node_target[v + 1] = node_source[v + 1] - 1;
  }
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) graph.set_weight(i, j, model.dep(node_source[i], node_target[j]));
  return graph;
}

namespace {

void check_weights(const AssignmentGraph& graph) {
  const std::size_t n = graph.n();
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j && !(graph.weight(i, j) >= 0.0))
        throw std::invalid_argument("negative or NaN edge weight " + std::to_string(i) + "->" +
                                    std::to_string(j));
}

// Every node must be reachable from ROOT along positive-weight edges,
// otherwise no rooted spanning tree has positive weight.
bool root_reaches_all(const AssignmentGraph& graph) {
  const std::size_t n = graph.n();
  std::vector<char> seen(n + 1, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 1; v <= n; ++v) {
      if (seen[v] || v == u || graph.weight(u, v) <= 0.0) continue;
      seen[v] = 1;
      ++reached;
      stack.push_back(v);
    }
  }
  return reached == n + 1;
}

// Q^0 with column j divided by its diagonal (the total weight entering
// node j + 1). Keeps every pivot of order one for large n.
struct ScaledMinor {
  Matrix scaled;
  std::vector<double> diag;
};

ScaledMinor scaled_minor(const AssignmentGraph& graph) {
  const std::size_t n = graph.n();
  ScaledMinor out{Matrix(n, n), std::vector<double>(n, 0.0)};
  for (std::size_t j = 1; j <= n; ++j) {
    double d = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      if (i != j) d += graph.weight(i, j);
    out.diag[j - 1] = d;
    for (std::size_t i = 1; i <= n; ++i)
      out.scaled(i - 1, j - 1) = i == j ? 1.0 : -graph.weight(i, j) / d;
  }
  return out;
}

struct Factored {
  ScaledMinor minor;
  LuDecomposition lu;
  LogPartition partition;
};

Factored factor(const AssignmentGraph& graph) {
  check_weights(graph);
  if (graph.n() == 0) throw std::invalid_argument("graph has no variable nodes");
  if (!root_reaches_all(graph))
    throw SingularLaplacian("no positive-weight spanning tree is rooted at ROOT");
  ScaledMinor minor = scaled_minor(graph);
  LuDecomposition lu(minor.scaled);
  if (lu.singular() || lu.sign() <= 0)
    throw SingularLaplacian("Laplacian minor is numerically singular");
  double log_z = lu.log_abs_det();
  for (double d : minor.diag) log_z += std::log(d);
  return Factored{std::move(minor), std::move(lu), LogPartition{log_z, 1}};
}

constexpr double kClampSlack = 1e-9;

double clamp_posterior(double p, std::size_t from, std::size_t to) {
  if (p < -kClampSlack || p > 1.0 + kClampSlack || std::isnan(p)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "edge posterior " << from << "->" << to << " = " << p << " is inconsistent";
    throw NumericError(msg.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

EdgePosteriors posteriors_from(const AssignmentGraph& graph, const Factored& f) {
  const std::size_t n = graph.n();
  // inv(Q^0) = D^-1 inv(S), so w(i,j) [inv(Q^0)_jj - inv(Q^0)_ji] becomes
  // (w(i,j) / d_j) [inv(S)_jj - inv(S)_ji] and no Z factor ever appears.
  const Matrix inv = f.lu.inverse();
  EdgePosteriors post(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t b = j - 1;
    const double d = f.minor.diag[b];
    const double own = inv(b, b);
    post(0, j) = clamp_posterior(graph.weight(0, j) / d * own, 0, j);
    for (std::size_t i = 1; i <= n; ++i) {
      if (i == j) continue;
      post(i, j) = clamp_posterior(graph.weight(i, j) / d * (own - inv(b, i - 1)), i, j);
    }
  }
  return post;
}

}  // namespace

Matrix build_laplacian(const AssignmentGraph& graph) {
  check_weights(graph);
  const std::size_t n = graph.n();
  Matrix q(n + 1, n + 1);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == j) continue;
      q(j, j) += graph.weight(i, j);
      q(i, j) = -graph.weight(i, j);
    }
  }
  return q;
}

Matrix laplacian_minor(const AssignmentGraph& graph) {
  const Matrix q = build_laplacian(graph);
  const std::size_t n = graph.n();
  Matrix minor(n, n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) minor(i - 1, j - 1) = q(i, j);
  return minor;
}

LogPartition log_partition(const AssignmentGraph& graph) { return factor(graph).partition; }

EdgePosteriors edge_posteriors(const AssignmentGraph& graph) {
  return posteriors_from(graph, factor(graph));
}

TreeMarginals tree_marginals(const AssignmentGraph& graph) {
  const Factored f = factor(graph);
  return TreeMarginals{f.partition, posteriors_from(graph, f)};
}

double log_unnormalized_joint(const LdfmModel& model, const Assignment& x) {
  return log_partition(make_assignment_graph(model, x)).log_z + log_stop_product(model, x);
}

}  // namespace ldfm
