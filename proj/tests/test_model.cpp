#include <doctest.h>

#include <stdexcept>

#include "ldfm/model.hpp"
#include "test_support.hpp"

using namespace ldfm;
using ldfm::testing::binary_schema;
using ldfm::testing::make_schema;

TEST_CASE("schema rejects malformed variable lists") {
  CHECK_THROWS_AS(VariableSchema({}), std::invalid_argument);
  CHECK_THROWS_AS(VariableSchema({{"A", {"x"}}, {"A", {"y"}}}), std::invalid_argument);
  CHECK_THROWS_AS(VariableSchema({Variable{"A", {}}}), std::invalid_argument);
  CHECK_THROWS_AS(VariableSchema({{"A", {"x", "x"}}}), std::invalid_argument);
}

TEST_CASE("schema maps pairs to dense indices") {
  const VariableSchema s = make_schema({2, 3, 1});
  CHECK(s.num_pairs() == 6);
  CHECK(s.pair_index(1, 2) == 4);
  CHECK(s.variable_of_pair(4) == 1);
  CHECK(s.value_of_pair(4) == 2);
  CHECK(s.find_value(1, "v2") == 2);
  CHECK_FALSE(s.find_variable("nope"));
  CHECK(s.state_space_size() == 6);
}

TEST_CASE("uniform model weights") {
  SUBCASE("two binary variables, pair source") {
    const LdfmModel m = make_uniform_model(binary_schema(2), Variant::kPlain);
    CHECK(lookup_weight(m, NodeKey::pair(0, 0), NodeKey::pair(1, 0)) == 0.5);
    CHECK(lookup_weight(m, NodeKey::pair(0, 0), NodeKey::pair(1, 1)) == 0.5);
  }
  SUBCASE("two binary variables, root source") {
    const LdfmModel m = make_uniform_model(binary_schema(2), Variant::kPlain);
    for (std::size_t v = 0; v < 2; ++v)
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(lookup_weight(m, NodeKey::root(), NodeKey::pair(v, k)) == 0.25);
  }
  SUBCASE("three ternary variables, stop-augmented") {
    const LdfmModel m = make_uniform_model(make_schema({3, 3, 3}), Variant::kStopAugmented);
    const NodeKey src = NodeKey::pair(0, 1);
    CHECK(m.stop_weight(src) == doctest::Approx(1.0 / 7).epsilon(1e-15));
    for (std::size_t v = 1; v < 3; ++v)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(lookup_weight(m, src, NodeKey::pair(v, k)) == doctest::Approx(1.0 / 7).epsilon(1e-15));
    // ROOT carries a stop weight too: 9 targets + stop.
    CHECK(m.stop_weight(NodeKey::root()) == doctest::Approx(0.1).epsilon(1e-15));
  }
}

TEST_CASE("uniform model is deterministic and valid") {
  const VariableSchema s = make_schema({2, 4, 3, 5});
  for (Variant variant : {Variant::kPlain, Variant::kStopAugmented}) {
    const LdfmModel a = make_uniform_model(s, variant);
    const LdfmModel b = make_uniform_model(s, variant);
    CHECK(a == b);
    CHECK(validate_model(a, 1e-9).empty());
  }
}

TEST_CASE("validate_model reports violations") {
  const VariableSchema s = binary_schema(2);
  SUBCASE("scaled row") {
    LdfmModel m = make_uniform_model(s, Variant::kPlain);
    const std::size_t src = m.source_of(0, 1);
    for (double& w : m.dep_row(src)) w *= 1.1;
    const auto violations = validate_model(m, 1e-9);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].source == NodeKey::pair(0, 1));
    CHECK(violations[0].message.find("X1=F") != std::string::npos);
  }
  SUBCASE("negative weight with the row still summing to one") {
    LdfmModel m = make_uniform_model(s, Variant::kPlain);
    m.set_weight(NodeKey::pair(0, 0), NodeKey::pair(1, 0), -0.5);
    m.set_weight(NodeKey::pair(0, 0), NodeKey::pair(1, 1), 1.5);
    const auto violations = validate_model(m, 1e-9);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].message.find("outside [0,1]") != std::string::npos);
  }
  SUBCASE("stop weights of one break normalization") {
    LdfmModel m = make_uniform_model(s, Variant::kStopAugmented);
    for (std::size_t src = 0; src < m.num_sources(); ++src) m.set_stop(src, 1.0);
    CHECK(validate_model(m, 1e-9).size() == m.num_sources());
  }
}

TEST_CASE("lookup_weight contract") {
  const LdfmModel m = make_uniform_model(binary_schema(2), Variant::kPlain);
  CHECK(lookup_weight(m, NodeKey::root(), NodeKey::pair(0, 0)) == 0.25);
  CHECK_THROWS_AS(lookup_weight(m, NodeKey::pair(0, 0), NodeKey::pair(0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(lookup_weight(m, NodeKey::pair(0, 0), NodeKey::root()), std::invalid_argument);
  CHECK_THROWS_AS(lookup_weight(m, NodeKey::root(), NodeKey::pair(0, 2)), std::out_of_range);
  CHECK_THROWS_AS(lookup_weight(m, NodeKey::pair(5, 0), NodeKey::pair(0, 0)), std::out_of_range);
}

TEST_CASE("random normalized models: every lookup is a probability") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const VariableSchema s = make_schema({1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(4)});
    const Variant variant = trial % 2 ? Variant::kStopAugmented : Variant::kPlain;
    const LdfmModel m = ldfm::testing::random_model(s, variant, rng);
    REQUIRE(validate_model(m, 1e-9).empty());
    for (std::size_t src = 0; src < m.num_sources(); ++src)
      for (std::size_t t = 0; t < m.num_targets(); ++t) {
        if (!m.is_legal(src, t)) continue;
        const double w = lookup_weight(m, m.source_key(src), m.source_key(t + 1));
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
      }
  }
}

TEST_CASE("log_stop_product covers ROOT and every variable") {
  LdfmModel m = make_uniform_model(binary_schema(2), Variant::kStopAugmented);
  // 4 targets + stop on ROOT, 2 targets + stop on each pair.
  const double expected = std::log(0.2) + 2 * std::log(1.0 / 3);
  CHECK(log_stop_product(m, Assignment(std::vector<int>{0, 1})) == doctest::Approx(expected).epsilon(1e-14));
  const LdfmModel plain = make_uniform_model(binary_schema(2), Variant::kPlain);
  CHECK(log_stop_product(plain, Assignment(std::vector<int>{0, 1})) == 0.0);
}
