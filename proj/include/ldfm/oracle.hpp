#pragma once

// Brute-force ground truth for tiny instances. Exponential by construction;
// used by the test suites and the `check` command, never by training or
// inference.

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "ldfm/matrix_tree.hpp"
#include "ldfm/model.hpp"
#include "ldfm/tree.hpp"

namespace ldfm {

inline constexpr std::size_t kMaxOracleNodes = 8;
inline constexpr std::size_t kMaxOracleStates = 4096;

/// Visits every rooted spanning tree of the complete graph on {0..n}.
/// Throws std::invalid_argument unless 1 <= n <= kMaxOracleNodes.
void for_each_rooted_tree(std::size_t n, const std::function<void(const ParentVector&)>& visit);

std::vector<ParentVector> enumerate_rooted_trees(std::size_t n);

LogPartition brute_log_partition(const AssignmentGraph& graph);
EdgePosteriors brute_edge_posteriors(const AssignmentGraph& graph);

/// log p(x) up to the plain model's constant, by tree enumeration.
double brute_unnormalized_joint(const LdfmModel& model, const Assignment& x);

/// log gamma: log of the summed unnormalized joint over every complete
/// assignment.
double brute_valid_normalizer(const LdfmModel& model);

/// Every completion of `evidence` with its exact conditional probability
/// phi(x | evidence), in lexicographic assignment order.
std::vector<std::pair<Assignment, double>> exact_posterior(const LdfmModel& model,
                                                           const Assignment& evidence);

/// P(query | evidence) by enumeration. Query and evidence must set disjoint
/// variables.
double exact_conditional(const LdfmModel& model, const Assignment& query,
                         const Assignment& evidence);

}  // namespace ldfm
