#pragma once

#include <cstddef>
#include <vector>

namespace ldfm {

inline constexpr int kNoParent = -1;

/// Candidate parent assignment over the non-root nodes 1..n of G_x.
/// parent[0] is always kNoParent.
struct ParentVector {
  std::vector<int> parent;

  ParentVector() = default;
  explicit ParentVector(std::size_t n) : parent(n + 1, 0) { parent[0] = kNoParent; }

  std::size_t n() const { return parent.empty() ? 0 : parent.size() - 1; }
  bool operator==(const ParentVector&) const = default;
};

/// True iff following parent links from every node reaches 0 without
/// revisiting a node.
bool is_rooted_tree(const ParentVector& tree);

/// in_subtree[v] is set for `node` and all of its descendants.
std::vector<char> subtree_mask(const ParentVector& tree, std::size_t node);

}  // namespace ldfm
