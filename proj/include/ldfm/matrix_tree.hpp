#pragma once

#include <cstddef>
#include <vector>

#include "ldfm/linalg.hpp"
#include "ldfm/model.hpp"

namespace ldfm {

/// The complete graph G_x for one assignment. Node 0 is ROOT and node j ≥ 1
/// is variable j - 1 holding its value in x. weight(i, j) is the weight of
/// the dependency edge i -> j; column 0 and the diagonal are unused.
class AssignmentGraph {
 public:
  explicit AssignmentGraph(std::size_t n) : n_(n), w_((n + 1) * (n + 1), 0.0) {}

  std::size_t n() const { return n_; }
  double weight(std::size_t from, std::size_t to) const { return w_[from * (n_ + 1) + to]; }
  void set_weight(std::size_t from, std::size_t to, double w) { w_[from * (n_ + 1) + to] = w; }

 private:
  std::size_t n_;
  std::vector<double> w_;
};

AssignmentGraph make_assignment_graph(const LdfmModel& model, const Assignment& x);

/// The (n+1)x(n+1) Laplacian Q: Q(j,j) sums the weights entering j and
/// Q(i,j) = -w(i,j). Throws std::invalid_argument on a negative weight.
Matrix build_laplacian(const AssignmentGraph& graph);

/// Q with row and column 0 removed.
Matrix laplacian_minor(const AssignmentGraph& graph);

struct LogPartition {
  double log_z = 0.0;
  int sign = 1;
};

/// Normalized edge expectations post(i, j) = <(x_i, x_j)>_x / Z_x: the
/// posterior probability that edge i -> j is in the latent tree.
class EdgePosteriors {
 public:
  explicit EdgePosteriors(std::size_t n) : n_(n), p_((n + 1) * (n + 1), 0.0) {}

  std::size_t n() const { return n_; }
  double operator()(std::size_t from, std::size_t to) const { return p_[from * (n_ + 1) + to]; }
  double& operator()(std::size_t from, std::size_t to) { return p_[from * (n_ + 1) + to]; }

 private:
  std::size_t n_;
  std::vector<double> p_;
};

struct TreeMarginals {
  LogPartition partition;
  EdgePosteriors posteriors;
};

/// log Z_x = log det(Q^0). Throws SingularLaplacian when no positive-weight
/// spanning tree rooted at node 0 exists.
LogPartition log_partition(const AssignmentGraph& graph);

/// Throws SingularLaplacian as log_partition does, NumericError when a raw
/// posterior falls below -1e-9.
EdgePosteriors edge_posteriors(const AssignmentGraph& graph);

/// Both of the above from a single factorization.
TreeMarginals tree_marginals(const AssignmentGraph& graph);

/// log p(x) up to the model's constant: log Z_x, plus the stop terms for the
/// stop-augmented variant.
double log_unnormalized_joint(const LdfmModel& model, const Assignment& x);

}  // namespace ldfm
