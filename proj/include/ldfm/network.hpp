#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ldfm/dataset.hpp"
#include "ldfm/model.hpp"

namespace ldfm {

/// Discrete Bayesian network used as a ground-truth data source.
/// cpt[v] holds one distribution over v's values per configuration of its
/// parents; configurations are mixed-radix with the first parent most
/// significant.
struct GroundTruthNet {
  VariableSchema schema;
  std::vector<std::vector<std::size_t>> parents;
  std::vector<std::vector<std::vector<double>>> cpt;

  /// Throws std::invalid_argument on cycles, mis-sized tables, or rows
  /// that do not sum to 1 within 1e-9.
  void validate() const;
  std::vector<std::size_t> topological_order() const;
  std::size_t parent_config(std::size_t var, const Assignment& x) const;
  double log_probability(const Assignment& x) const;
};

/// Ancestral sampling in topological order; deterministic given `seed`.
Dataset forward_sample(const GroundTruthNet& net, std::size_t count, std::uint64_t seed);

/// Bundled networks: "asia" (8 binary variables), "sachs" (11 ternary) and
/// "child" (20 variables, cardinality 2 to 6). Structures are shaped after
/// the classic benchmark networks of the same sizes; the probability tables
/// are our own.
GroundTruthNet fixture_network(std::string_view name);
std::vector<std::string> fixture_names();
/// The bundled network with `n` variables (8, 11 or 20).
GroundTruthNet fixture_network_by_size(std::size_t n);

}  // namespace ldfm
