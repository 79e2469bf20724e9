#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "ldfm/error.hpp"
#include "ldfm/matrix_tree.hpp"
#include "ldfm/mcmc.hpp"
#include "ldfm/oracle.hpp"
#include "test_support.hpp"

using namespace ldfm;
using ldfm::testing::binary_schema;
using ldfm::testing::make_schema;

namespace {

QueryInstance make_instance(const Assignment& query, const Assignment& evidence) {
  QueryInstance inst{evidence, query, {}};
  for (std::size_t i = 0; i < query.size(); ++i)
    if (!query.is_set(i) && !evidence.is_set(i)) inst.hidden.push_back(i);
  return inst;
}

// Total variation between the empirical distribution of `samples` and the
// exact posterior given `evidence`.
double tv_to_exact(const LdfmModel& model, const Assignment& evidence, const std::vector<Assignment>& samples) {
  std::map<Assignment, double> empirical;
  for (const auto& x : samples) empirical[x] += 1.0 / static_cast<double>(samples.size());
  double tv = 0.0;
  for (const auto& [x, p] : exact_posterior(model, evidence)) {
    tv += std::abs(p - empirical[x]);
    empirical.erase(x);
  }
  for (const auto& [x, p] : empirical) tv += p;  // states the oracle rules out
  return 0.5 * tv;
}

}  // namespace

TEST_CASE("random rooted trees are valid and uniform") {
  Rng rng(51);
  for (std::size_t n : {2u, 3u}) {
    const std::size_t draws = 40000;
    std::map<std::vector<int>, std::size_t> counts;
    for (std::size_t d = 0; d < draws; ++d) {
      const ParentVector t = random_rooted_tree(n, rng);
      REQUIRE(is_rooted_tree(t));
      ++counts[t.parent];
    }
    const double expected = 1.0 / static_cast<double>(enumerate_rooted_trees(n).size());
    CHECK(counts.size() == enumerate_rooted_trees(n).size());
    for (const auto& [tree, c] : counts)
      CHECK(std::abs(static_cast<double>(c) / draws - expected) < 0.01);
  }
  for (std::size_t n = 1; n <= 40; ++n) CHECK(is_rooted_tree(random_rooted_tree(n, rng)));
}

TEST_CASE("init_chain pins evidence") {
  const LdfmModel m = make_uniform_model(make_schema({3, 3, 3}), Variant::kPlain);
  const Assignment ev(std::vector<int>{kMissing, 2, kMissing});
  const ChainState s = init_chain(m, ev, SamplerKind::kTreeAugmented, Rng(5));
  CHECK(s.values[1] == 2);
  CHECK(s.pinned == std::vector<char>{0, 1, 0});
  CHECK(s.values.is_complete());
  CHECK(is_rooted_tree(s.parents));
}

TEST_CASE("gibbs sweep on one variable draws from the ROOT weights") {
  const VariableSchema schema = make_schema({3});
  LdfmModel m(schema, Variant::kPlain);
  m.dep(0, 0) = 0.2;
  m.dep(0, 1) = 0.5;
  m.dep(0, 2) = 0.3;
  ChainState s = init_chain(m, Assignment(1), SamplerKind::kGibbs, Rng(6));
  std::vector<double> freq(3, 0.0);
  const int sweeps = 30000;
  for (int k = 0; k < sweeps; ++k) {
    gibbs_sweep(m, s);
    freq[s.values[0]] += 1.0 / sweeps;
  }
  CHECK(std::abs(freq[0] - 0.2) < 0.02);
  CHECK(std::abs(freq[1] - 0.5) < 0.02);
  CHECK(std::abs(freq[2] - 0.3) < 0.02);
}

TEST_CASE("gibbs sweep never moves a fully pinned state") {
  const LdfmModel m = make_uniform_model(binary_schema(3), Variant::kPlain);
  const Assignment ev(std::vector<int>{1, 0, 1});
  ChainState s = init_chain(m, ev, SamplerKind::kGibbs, Rng(7));
  for (int k = 0; k < 50; ++k) gibbs_sweep(m, s);
  CHECK(s.values == ev);
}

TEST_CASE("gibbs sweep throws when no value has positive probability") {
  LdfmModel m = make_uniform_model(binary_schema(2), Variant::kPlain);
  for (std::size_t t = 0; t < m.num_targets(); ++t) m.dep(0, t) = 0.0;
  ChainState s = init_chain(m, Assignment(2), SamplerKind::kGibbs, Rng(8));
  CHECK_THROWS_AS(gibbs_sweep(m, s), NumericError);
}

TEST_CASE("tree step with one variable keeps ROOT as parent") {
  const LdfmModel m = make_uniform_model(make_schema({4}), Variant::kPlain);
  ChainState s = init_chain(m, Assignment(1), SamplerKind::kTreeAugmented, Rng(9));
  for (int k = 0; k < 100; ++k) {
    tree_augmented_step(m, s);
    CHECK(s.parents.parent[1] == 0);
  }
}

TEST_CASE("tree steps keep a valid tree and never touch evidence") {
  Rng rng(52);
  const VariableSchema schema = make_schema({2, 3, 2, 4, 2});
  const LdfmModel m = ldfm::testing::random_model(schema, Variant::kStopAugmented, rng);
  const Assignment ev(std::vector<int>{kMissing, 1, kMissing, 3, kMissing});
  for (TreeMove move : {TreeMove::kFullConditional, TreeMove::kIncomingProposal}) {
    ChainState s = init_chain(m, ev, SamplerKind::kTreeAugmented, Rng(10));
    for (int k = 0; k < 2000; ++k) {
      tree_augmented_step(m, s, move);
      REQUIRE(is_rooted_tree(s.parents));
      REQUIRE(s.values[1] == 1);
      REQUIRE(s.values[3] == 3);
    }
    CHECK(s.steps == 2000);
    if (move == TreeMove::kFullConditional) CHECK(s.accepted == 2000);
  }
}

TEST_CASE("with every value pinned the tree chain samples edges from their posteriors") {
  Rng rng(53);
  const VariableSchema schema = make_schema({2, 3, 2});
  const LdfmModel m = ldfm::testing::random_model(schema, Variant::kPlain, rng);
  const Assignment x(std::vector<int>{1, 2, 0});
  const EdgePosteriors post = edge_posteriors(make_assignment_graph(m, x));
  for (TreeMove move : {TreeMove::kFullConditional, TreeMove::kIncomingProposal}) {
    ChainState s = init_chain(m, x, SamplerKind::kTreeAugmented, Rng(11));
    for (int k = 0; k < 300; ++k) tree_augmented_step(m, s, move);
    std::vector<double> freq(16, 0.0);
    const int steps = 60000;
    for (int k = 0; k < steps; ++k) {
      tree_augmented_step(m, s, move);
      for (std::size_t j = 1; j <= 3; ++j) freq[s.parents.parent[j] * 4 + j] += 1.0 / steps;
    }
    for (std::size_t i = 0; i <= 3; ++i)
      for (std::size_t j = 1; j <= 3; ++j)
        if (i != j) CHECK(std::abs(freq[i * 4 + j] - post(i, j)) < 0.02);
  }
}

TEST_CASE("both samplers match the exact posterior on a tiny model") {
  Rng rng(54);
  const VariableSchema schema = binary_schema(3);
  for (Variant variant : {Variant::kPlain, Variant::kStopAugmented}) {
    const LdfmModel m = ldfm::testing::random_model(schema, variant, rng);
    const Assignment ev(std::vector<int>{kMissing, 0, kMissing});
    const QueryInstance inst = make_instance(Assignment(std::vector<int>{1, kMissing, kMissing}), ev);
    for (SamplerKind kind : {SamplerKind::kGibbs, SamplerKind::kTreeAugmented}) {
      SamplerConfig c;
      c.sampler = kind;
      c.samples = 20000;
      c.seed = 99;
      const auto samples = run_chain(m, inst, c);
      CHECK(samples.size() == 20000);
      CHECK(tv_to_exact(m, ev, samples) < 0.03);
      for (const auto& x : samples) REQUIRE(x[1] == 0);
    }
    SamplerConfig mh;
    mh.sampler = SamplerKind::kTreeAugmented;
    mh.tree_move = TreeMove::kIncomingProposal;
    mh.samples = 20000;
    mh.seed = 98;
    CHECK(tv_to_exact(m, ev, run_chain(m, inst, mh)) < 0.03);
  }
}

TEST_CASE("run_chain is deterministic per seed and chain") {
  Rng rng(55);
  const VariableSchema schema = make_schema({2, 3, 2});
  const LdfmModel m = ldfm::testing::random_model(schema, Variant::kPlain, rng);
  const QueryInstance inst = make_instance(Assignment(std::vector<int>{0, kMissing, kMissing}),
                                           Assignment(std::vector<int>{kMissing, kMissing, 1}));
  for (SamplerKind kind : {SamplerKind::kGibbs, SamplerKind::kTreeAugmented}) {
    SamplerConfig c;
    c.sampler = kind;
    c.samples = 200;
    c.seed = 17;
    const auto a = run_chain(m, inst, c);
    CHECK(a == run_chain(m, inst, c));
    c.chains = 3;
    const auto pooled = run_chain(m, inst, c);
    CHECK(pooled.size() == 600);
    CHECK(std::equal(a.begin(), a.end(), pooled.begin()));
    c.seed = 18;
    c.chains = 1;
    CHECK(a != run_chain(m, inst, c));
  }
}

TEST_CASE("config and instance validation") {
  SamplerConfig c;
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SamplerConfig{};
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = SamplerConfig{};
  c.chains = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(SamplerConfig{}.burn_in_for(5) == 50);
  c = SamplerConfig{};
  c.sampler = SamplerKind::kTreeAugmented;
  CHECK(c.burn_in_for(5) == 500);

  const VariableSchema schema = binary_schema(3);
  QueryInstance overlap{Assignment(std::vector<int>{0, kMissing, kMissing}),
                        Assignment(std::vector<int>{0, 1, kMissing}),
                        {2}};
  CHECK_THROWS_AS(validate_instance(schema, overlap), std::invalid_argument);
  QueryInstance missing{Assignment(3), Assignment(std::vector<int>{0, kMissing, kMissing}), {1}};
  CHECK_THROWS_AS(validate_instance(schema, missing), std::invalid_argument);
  CHECK_NOTHROW(validate_instance(schema, make_instance(Assignment(std::vector<int>{0, kMissing, kMissing}),
                                                        Assignment(3))));
  CHECK(parse_sampler("tree") == SamplerKind::kTreeAugmented);
  CHECK_THROWS(parse_sampler("hmc"));
}

TEST_CASE("estimators on hand-made samples") {
  const VariableSchema schema = make_schema({2, 3, 2});
  const QueryInstance inst = make_instance(Assignment(std::vector<int>{1, 2, kMissing}), Assignment(3));
  std::vector<Assignment> samples = {
      Assignment(std::vector<int>{1, 2, 0}), Assignment(std::vector<int>{1, 2, 1}),
      Assignment(std::vector<int>{1, 0, 0}), Assignment(std::vector<int>{0, 2, 0}),
      Assignment(std::vector<int>{0, 1, 1}),
  };
  CHECK(estimate_cll(samples, inst) == doctest::Approx(std::log(3.0 / 7.0)));
  CHECK(estimate_cmll(samples, inst, schema) == doctest::Approx(std::log(4.0 / 7.0) + std::log(4.0 / 8.0)));
  CHECK(normalized_cll(samples, inst) == doctest::Approx(std::log(3.0 / 7.0) / 2));
  CHECK(normalized_cmll(samples, inst, schema) ==
        doctest::Approx((std::log(4.0 / 7.0) + std::log(4.0 / 8.0)) / 2));
  CHECK_THROWS_AS(estimate_cll(std::vector<Assignment>{}, inst), std::invalid_argument);
  CHECK_THROWS_AS(estimate_cll(samples, make_instance(Assignment(3), Assignment(3))), std::invalid_argument);

  // Single binary query variable: CLL and CMLL share the same denominator.
  const QueryInstance one = make_instance(Assignment(std::vector<int>{1, kMissing, kMissing}), Assignment(3));
  CHECK(estimate_cll(samples, one) == doctest::Approx(estimate_cmll(samples, one, schema)));
  // Bounds hold even when nothing or everything matches.
  for (const auto& s : {std::vector<Assignment>(4, Assignment(std::vector<int>{0, 0, 0})),
                        std::vector<Assignment>(4, Assignment(std::vector<int>{1, 2, 0}))}) {
    CHECK(estimate_cll(s, inst) < 0.0);
    CHECK(std::exp(estimate_cll(s, inst)) > 0.0);
    CHECK(estimate_cmll(s, inst, schema) < 0.0);
  }
}

TEST_CASE("uniform model: each query term approaches -log|domain|") {
  const LdfmModel m = make_uniform_model(binary_schema(3), Variant::kPlain);
  const QueryInstance inst = make_instance(Assignment(std::vector<int>{0, 1, kMissing}), Assignment(3));
  SamplerConfig c;
  c.samples = 20000;
  c.seed = 3;
  const auto samples = run_chain(m, inst, c);
  CHECK(std::abs(normalized_cmll(samples, inst, m.schema()) + std::log(2.0)) < 0.02);
}

TEST_CASE("CMLL matches the exact per-variable conditionals") {
  Rng rng(56);
  const VariableSchema schema = binary_schema(3);
  const LdfmModel m = ldfm::testing::random_model(schema, Variant::kPlain, rng);
  const Assignment ev(std::vector<int>{kMissing, kMissing, 1});
  const QueryInstance inst = make_instance(Assignment(std::vector<int>{0, 1, kMissing}), ev);
  double exact = 0.0;
  exact += std::log(exact_conditional(m, Assignment(std::vector<int>{0, kMissing, kMissing}), ev));
  exact += std::log(exact_conditional(m, Assignment(std::vector<int>{kMissing, 1, kMissing}), ev));
  for (SamplerKind kind : {SamplerKind::kGibbs, SamplerKind::kTreeAugmented}) {
    SamplerConfig c;
    c.sampler = kind;
    c.samples = 50000;
    c.seed = 4;
    CHECK(std::abs(estimate_cmll(run_chain(m, inst, c), inst, schema) - exact) < 0.02);
  }
}
