#include "ldfm/network.hpp"

#include <cmath>
#include <stdexcept>

#include "ldfm/rng.hpp"

namespace ldfm {

void GroundTruthNet::validate() const {
  const std::size_t n = schema.size();
  if (parents.size() != n || cpt.size() != n)
    throw std::invalid_argument("network tables do not match the schema");
  topological_order();
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t configs = 1;
    for (std::size_t p : parents[v]) {
      if (p >= n || p == v) throw std::invalid_argument("bad parent index");
      configs *= schema.cardinality(p);
    }
    if (cpt[v].size() != configs)
      throw std::invalid_argument("variable '" + schema.variable(v).name + "' has " +
                                  std::to_string(cpt[v].size()) + " CPT rows, expected " +
                                  std::to_string(configs));
    for (const auto& row : cpt[v]) {
      if (row.size() != schema.cardinality(v))
        throw std::invalid_argument("CPT row of '" + schema.variable(v).name + "' has wrong length");
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw std::invalid_argument("negative CPT entry");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("CPT row of '" + schema.variable(v).name + "' does not sum to 1");
    }
  }
}

std::vector<std::size_t> GroundTruthNet::topological_order() const {
  const std::size_t n = schema.size();
  std::vector<std::size_t> order;
  std::vector<char> placed(n, 0);
  while (order.size() < n) {
    bool progress = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (placed[v]) continue;
      bool ready = true;
      for (std::size_t p : parents[v]) ready = ready && p < n && placed[p];
      if (!ready) continue;
      placed[v] = 1;
      order.push_back(v);
      progress = true;
    }
    if (!progress) throw std::invalid_argument("network parent graph has a cycle");
  }
  return order;
}

std::size_t GroundTruthNet::parent_config(std::size_t var, const Assignment& x) const {
  std::size_t config = 0;
  for (std::size_t p : parents[var])
    config = config * schema.cardinality(p) + static_cast<std::size_t>(x[p]);
  return config;
}

double GroundTruthNet::log_probability(const Assignment& x) const {
  double total = 0.0;
  for (std::size_t v = 0; v < schema.size(); ++v)
    total += std::log(cpt[v][parent_config(v, x)][static_cast<std::size_t>(x[v])]);
  return total;
}

Dataset forward_sample(const GroundTruthNet& net, std::size_t count, std::uint64_t seed) {
  net.validate();
  const std::vector<std::size_t> order = net.topological_order();
  Rng rng(seed);
  Dataset out{net.schema, {}};
  out.rows.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    Assignment x(net.schema.size());
    for (std::size_t v : order) {
      const auto& row = net.cpt[v][net.parent_config(v, x)];
      double u = rng.uniform();
      std::size_t pick = row.size() - 1;
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (u < row[k]) {
          pick = k;
          break;
        }
        u -= row[k];
      }
      // Never land on a zero-probability value through roundoff.
      while (row[pick] == 0.0 && pick > 0) --pick;
      x[v] = static_cast<int>(pick);
    }
    out.rows.push_back(std::move(x));
  }
  return out;
}

namespace {

GroundTruthNet asia_like() {
  const std::vector<std::string> yn{"yes", "no"};
  std::vector<Variable> vars;
  for (const char* name : {"asia", "tub", "smoke", "lung", "bronc", "either", "xray", "dysp"})
    vars.push_back({name, yn});
  auto b = [](double p_yes) { return std::vector<double>{p_yes, 1.0 - p_yes}; };
  GroundTruthNet net{VariableSchema(std::move(vars)), {}, {}};
  net.parents = {{}, {0}, {}, {2}, {2}, {1, 3}, {5}, {4, 5}};
  net.cpt = {
      {b(0.1)},
      {b(0.1), b(0.02)},
      {b(0.5)},
      {b(0.2), b(0.03)},
      {b(0.6), b(0.3)},
      {b(1.0), b(1.0), b(1.0), b(0.0)},
      {b(0.95), b(0.08)},
      {b(0.9), b(0.8), b(0.7), b(0.1)},
  };
  return net;
}

// Tables with a dominant value per parent configuration, drawn from a fixed
// internal stream so the fixture never changes.
void fill_random_cpts(GroundTruthNet& net, std::uint64_t stream) {
  Rng rng(0x1df3u, stream);
  net.cpt.assign(net.schema.size(), {});
  for (std::size_t v = 0; v < net.schema.size(); ++v) {
    std::size_t configs = 1;
    for (std::size_t p : net.parents[v]) configs *= net.schema.cardinality(p);
    const std::size_t k = net.schema.cardinality(v);
    for (std::size_t c = 0; c < configs; ++c) {
      std::vector<double> row(k);
      const std::size_t dominant = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k));
      double rest = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        row[i] = 0.2 + rng.uniform();
        if (i != dominant) rest += row[i];
      }
      const double top = 0.55 + 0.35 * rng.uniform();
      for (std::size_t i = 0; i < k; ++i) row[i] = i == dominant ? top : (1.0 - top) * row[i] / rest;
      net.cpt[v].push_back(std::move(row));
    }
  }
}

GroundTruthNet sachs_like() {
  const std::vector<std::string> lvl{"low", "avg", "high"};
  std::vector<Variable> vars;
  for (const char* name :
       {"Raf", "Mek", "Plcg", "PIP2", "PIP3", "Erk", "Akt", "PKA", "PKC", "P38", "Jnk"})
    vars.push_back({name, lvl});
  GroundTruthNet net{VariableSchema(std::move(vars)), {}, {}};
  net.parents = {{8, 7}, {8, 7, 0}, {}, {2, 4}, {2}, {1, 7}, {5, 7}, {8}, {}, {8, 7}, {8, 7}};
  fill_random_cpts(net, 11);
  return net;
}

GroundTruthNet child_like() {
  const std::vector<std::size_t> card{2, 3, 2, 4, 3, 2, 6, 3, 2, 3, 4, 2, 3, 2, 5, 3, 2, 3, 2, 4};
  std::vector<Variable> vars;
  for (std::size_t v = 0; v < card.size(); ++v) {
    Variable var{(v < 9 ? "C0" : "C") + std::to_string(v + 1), {}};
    for (std::size_t k = 0; k < card[v]; ++k) var.values.push_back("s" + std::to_string(k));
    vars.push_back(std::move(var));
  }
  GroundTruthNet net{VariableSchema(std::move(vars)), {}, {}};
  Rng rng(0x1df3u, 20);
  net.parents.assign(card.size(), {});
  for (std::size_t v = 1; v < card.size(); ++v) {
    const std::size_t first = static_cast<std::size_t>(rng.uniform() * static_cast<double>(v));
    net.parents[v].push_back(first);
    if (v > 1 && rng.uniform() < 0.5) {
      std::size_t second = static_cast<std::size_t>(rng.uniform() * static_cast<double>(v - 1));
      if (second >= first) ++second;
      net.parents[v].push_back(second);
    }
  }
  fill_random_cpts(net, 20);
  return net;
}

}  // namespace

GroundTruthNet fixture_network(std::string_view name) {
  GroundTruthNet net = [&] {
    if (name == "asia") return asia_like();
    if (name == "sachs") return sachs_like();
    if (name == "child") return child_like();
    throw std::invalid_argument("unknown fixture network '" + std::string(name) + "'");
  }();
  net.validate();
  return net;
}

std::vector<std::string> fixture_names() { return {"asia", "sachs", "child"}; }

GroundTruthNet fixture_network_by_size(std::size_t n) {
  for (const auto& name : fixture_names()) {
    GroundTruthNet net = fixture_network(name);
    if (net.schema.size() == n) return net;
  }
  throw std::invalid_argument("no bundled network has " + std::to_string(n) +
                              " variables (choose 8, 11 or 20)");
}

}  // namespace ldfm
