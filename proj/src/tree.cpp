#include "ldfm/tree.hpp"

namespace ldfm {

bool is_rooted_tree(const ParentVector& tree) {
  const std::size_t n = tree.n();
  if (tree.parent.empty() || tree.parent[0] != kNoParent) return false;
  // 0 = unvisited, 1 = on the current path, 2 = known to reach the root.
  std::vector<char> state(n + 1, 0);
  state[0] = 2;
  std::vector<std::size_t> path;
  for (std::size_t start = 1; start <= n; ++start) {
    path.clear();
    std::size_t v = start;
    while (state[v] == 0) {
      const int p = tree.parent[v];
      if (p < 0 || static_cast<std::size_t>(p) > n || static_cast<std::size_t>(p) == v)
        return false;
      state[v] = 1;
      path.push_back(v);
      v = static_cast<std::size_t>(p);
    }
    if (state[v] == 1) return false;
    for (std::size_t u : path) state[u] = 2;
  }
  return true;
}

std::vector<char> subtree_mask(const ParentVector& tree, std::size_t node) {
  const std::size_t n = tree.n();
  std::vector<std::vector<std::size_t>> children(n + 1);
  for (std::size_t v = 1; v <= n; ++v) children[static_cast<std::size_t>(tree.parent[v])].push_back(v);
  std::vector<char> mask(n + 1, 0);
  std::vector<std::size_t> stack{node};
  mask[node] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t c : children[u]) {
      if (mask[c]) continue;
      mask[c] = 1;
      stack.push_back(c);
    }
  }
  return mask;
}

}  // namespace ldfm
