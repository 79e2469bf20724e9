#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ldfm/em.hpp"
#include "ldfm/eval.hpp"
#include "ldfm/network.hpp"
#include "test_support.hpp"

using namespace ldfm;

namespace {

Dataset chain_dataset(std::size_t rows, std::uint64_t seed) {
  // X1 -> X2 -> X3 -> X4, each child copying its parent 90% of the time.
  const VariableSchema schema = ldfm::testing::binary_schema(4);
  Rng rng(seed);
  Dataset d{schema, {}};
  for (std::size_t r = 0; r < rows; ++r) {
    Assignment x(4);
    x[0] = rng.uniform() < 0.3 ? 0 : 1;
    for (std::size_t v = 1; v < 4; ++v) x[v] = rng.uniform() < 0.9 ? x[v - 1] : 1 - x[v - 1];
    d.rows.push_back(x);
  }
  return d;
}

}  // namespace

TEST_CASE("split sizes use nearest rounding") {
  const SplitSizes a = split_sizes(10, 0.4, 0.3);
  CHECK(a.query == 4);
  CHECK(a.evidence == 3);
  CHECK(a.hidden == 3);
  const SplitSizes b = split_sizes(8, 0.3, 0.2);
  CHECK(b.query == 2);
  CHECK(b.evidence == 2);
  CHECK(b.hidden == 4);
  const SplitSizes c = split_sizes(2, 0.1, 0.0);
  CHECK(c.query == 1);  // clamped up from 0
  CHECK(split_sizes(3, 0.5, 0.5).hidden == 0);
  CHECK_THROWS_AS(split_sizes(5, 0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(split_sizes(5, 0.7, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(split_sizes(5, 0.3, -0.1), std::invalid_argument);
}

TEST_CASE("query instances partition the variables and follow the seed") {
  const Dataset test = forward_sample(fixture_network("sachs"), 40, 5);
  const auto a = make_query_instances(test, 0.4, 0.3, 100, 7);
  CHECK(a.size() == 100);
  for (const auto& inst : a) {
    CHECK_NOTHROW(validate_instance(test.schema, inst));
    CHECK(inst.query_variables().size() == 4);
    CHECK(inst.hidden.size() == 4);  // 11 variables: 4 query, 3 evidence
  }
  const auto b = make_query_instances(test, 0.4, 0.3, 100, 7);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].query == b[k].query);
    CHECK(a[k].evidence == b[k].evidence);
    CHECK(a[k].hidden == b[k].hidden);
  }
  const auto c = make_query_instances(test, 0.4, 0.3, 100, 8);
  bool differs = false;
  for (std::size_t k = 0; k < a.size(); ++k) differs = differs || !(a[k].query == c[k].query);
  CHECK(differs);
}

TEST_CASE("uniform model with one binary query variable scores about log 0.5") {
  const VariableSchema schema = ldfm::testing::binary_schema(2);
  const LdfmModel m = make_uniform_model(schema, Variant::kPlain);
  const Dataset test{schema, {Assignment(std::vector<int>{0, 1}), Assignment(std::vector<int>{1, 1}),
                              Assignment(std::vector<int>{0, 0})}};
  const auto instances = make_query_instances(test, 0.5, 0.5, 20, 1);
  SamplerConfig c;
  c.samples = 4000;
  c.seed = 2;
  const EvalReport r = evaluate(m, instances, c, 1);
  CHECK(std::abs(r.mean_cmll - std::log(0.5)) < 0.02);
  for (const auto& s : r.per_instance) {
    CHECK(s.best >= s.cll);
    CHECK(s.best >= s.cmll);
  }
}

TEST_CASE("evaluate is deterministic and independent of the worker count") {
  Rng rng(71);
  const Dataset test = chain_dataset(30, 72);
  const LdfmModel m = ldfm::testing::random_model(test.schema, Variant::kPlain, rng);
  const auto instances = make_query_instances(test, 0.4, 0.3, 12, 3);
  SamplerConfig c;
  c.samples = 300;
  c.seed = 5;
  for (SamplerKind kind : {SamplerKind::kGibbs, SamplerKind::kTreeAugmented}) {
    c.sampler = kind;
    const EvalReport one = evaluate(m, instances, c, 1);
    const EvalReport again = evaluate(m, instances, c, 1);
    const EvalReport many = evaluate(m, instances, c, 4);
    for (std::size_t k = 0; k < instances.size(); ++k) {
      CHECK(one.per_instance[k].cll == again.per_instance[k].cll);
      CHECK(one.per_instance[k].cmll == many.per_instance[k].cmll);
      CHECK(one.per_instance[k].best == many.per_instance[k].best);
    }
    CHECK(one.mean_max == many.mean_max);
  }
}

TEST_CASE("independence baseline needs no sampling") {
  const Dataset train = chain_dataset(200, 73);
  const IndependenceBaseline base = IndependenceBaseline::fit(train);
  double count0 = 0;
  for (const auto& row : train.rows) count0 += row[0] == 0;
  CHECK(base.log_marginal(0, 0) == doctest::Approx(std::log((count0 + 1) / 202.0)));
  const auto instances = make_query_instances(chain_dataset(20, 74), 0.5, 0.25, 10, 1);
  const EvalReport r = evaluate_baseline(base, instances);
  CHECK(r.per_instance.size() == 10);
  CHECK(r.mean_cll == r.mean_cmll);
  CHECK(std::isfinite(r.mean_max));
  CHECK(r.q_frac == doctest::Approx(0.5));
  CHECK(r.e_frac == doctest::Approx(0.25));
}

TEST_CASE("a trained model beats the baseline on chain-structured data") {
  const Dataset train = chain_dataset(500, 75);
  const Dataset test = chain_dataset(100, 76);
  TrainConfig tc;
  tc.max_iters = 30;
  const LdfmModel m = train_em(train.rows, train.schema, tc).model;
  const auto instances = make_query_instances(test, 0.5, 0.25, 100, 9);
  SamplerConfig c;
  c.samples = 500;
  c.seed = 1;
  const EvalReport learned = evaluate(m, instances, c, 1);
  const EvalReport base = evaluate_baseline(IndependenceBaseline::fit(train), instances);
  CHECK(learned.mean_max >= base.mean_max);
}

TEST_CASE("report text has exactly the documented fields") {
  EvalReport r;
  r.per_instance = {{-1.0, -0.5, -0.5}, {-2.0, -1.5, -1.5}};
  r.q_frac = 0.4;
  r.e_frac = 0.3;
  finalize_means(r);
  CHECK(r.mean_cll == -1.5);
  CHECK(r.mean_cmll == -1.0);
  CHECK(r.mean_max == -1.0);
  std::istringstream in(format_report(r));
  std::vector<std::string> keys;
  for (std::string line; std::getline(in, line);) keys.push_back(line.substr(0, line.find(':')));
  CHECK(keys == std::vector<std::string>{"instances", "q_frac", "e_frac", "mean_cll", "mean_cmll", "mean_max",
                                         "seconds_train", "seconds_infer"});
}
