#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ldfm/matrix_tree.hpp"
#include "ldfm/model.hpp"
#include "ldfm/rng.hpp"

namespace ldfm::testing {

// n = 2 graph with w01=0.2, w02=0.3, w12=0.4, w21=0.5. Its three rooted
// trees weigh 0.2*0.3, 0.2*0.4 and 0.3*0.5, so Z = 0.29.
inline AssignmentGraph worked_graph() {
  AssignmentGraph g(2);
  g.set_weight(0, 1, 0.2);
  g.set_weight(0, 2, 0.3);
  g.set_weight(1, 2, 0.4);
  g.set_weight(2, 1, 0.5);
  return g;
}

inline AssignmentGraph random_graph(std::size_t n, Rng& rng, double lo = 0.01, double hi = 1.0) {
  AssignmentGraph g(n);
  for (std::size_t i = 0; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i != j) g.set_weight(i, j, lo + (hi - lo) * rng.uniform());
  return g;
}

inline VariableSchema make_schema(const std::vector<std::size_t>& cards) {
  std::vector<Variable> vars;
  for (std::size_t v = 0; v < cards.size(); ++v) {
    Variable var{"X" + std::to_string(v + 1), {}};
    for (std::size_t k = 0; k < cards[v]; ++k) var.values.push_back("v" + std::to_string(k));
    vars.push_back(std::move(var));
  }
  return VariableSchema(std::move(vars));
}

inline VariableSchema binary_schema(std::size_t n) {
  std::vector<Variable> vars;
  for (std::size_t v = 0; v < n; ++v) vars.push_back({"X" + std::to_string(v + 1), {"T", "F"}});
  return VariableSchema(std::move(vars));
}

// Normalized model with random positive weights (and stop weights).
inline LdfmModel random_model(const VariableSchema& schema, Variant variant, Rng& rng) {
  LdfmModel m(schema, variant);
  for (std::size_t s = 0; s < m.num_sources(); ++s) {
    double total = 0.0;
    for (std::size_t t = 0; t < m.num_targets(); ++t) {
      if (!m.is_legal(s, t)) continue;
      m.dep(s, t) = 0.05 + rng.uniform();
      total += m.dep(s, t);
    }
    double stop = 0.0;
    if (m.has_stop()) {
      stop = 0.05 + rng.uniform();
      total += stop;
      m.set_stop(s, stop / total);
    }
    for (std::size_t t = 0; t < m.num_targets(); ++t)
      if (m.is_legal(s, t)) m.dep(s, t) /= total;
  }
  return m;
}

inline Assignment random_assignment(const VariableSchema& schema, Rng& rng) {
  Assignment x(schema.size());
  for (std::size_t v = 0; v < schema.size(); ++v) x[v] = static_cast<int>(rng.below(schema.cardinality(v)));
  return x;
}

// Two binary variables whose graph for x = (T, T) is worked_graph().
inline LdfmModel worked_model() {
  LdfmModel m(binary_schema(2), Variant::kPlain);
  const NodeKey root = NodeKey::root();
  const NodeKey x1t = NodeKey::pair(0, 0), x1f = NodeKey::pair(0, 1);
  const NodeKey x2t = NodeKey::pair(1, 0), x2f = NodeKey::pair(1, 1);
  m.set_weight(root, x1t, 0.2);
  m.set_weight(root, x1f, 0.3);
  m.set_weight(root, x2t, 0.3);
  m.set_weight(root, x2f, 0.2);
  m.set_weight(x1t, x2t, 0.4);
  m.set_weight(x1t, x2f, 0.6);
  m.set_weight(x2t, x1t, 0.5);
  m.set_weight(x2t, x1f, 0.5);
  m.set_weight(x1f, x2t, 0.5);
  m.set_weight(x1f, x2f, 0.5);
  m.set_weight(x2f, x1t, 0.5);
  m.set_weight(x2f, x1f, 0.5);
  return m;
}

}  // namespace ldfm::testing
