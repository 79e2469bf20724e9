#include "ldfm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ldfm/parallel.hpp"
#include "ldfm/rng.hpp"

namespace ldfm {

SplitSizes split_sizes(std::size_t n, double q_frac, double e_frac) {
  if (!(q_frac > 0.0)) throw std::invalid_argument("q_frac must be positive");
  if (!(e_frac >= 0.0)) throw std::invalid_argument("e_frac must be nonnegative");
  if (q_frac + e_frac > 1.0 + 1e-12) throw std::invalid_argument("q_frac + e_frac exceeds 1");
  const double dn = static_cast<double>(n);
  SplitSizes s;
  s.query = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(q_frac * dn)), 1, n);
  s.evidence = std::min(static_cast<std::size_t>(std::llround(e_frac * dn)), n - s.query);
  s.hidden = n - s.query - s.evidence;
  return s;
}

std::vector<QueryInstance> make_query_instances(const Dataset& test, double q_frac, double e_frac,
                                                std::size_t count, std::uint64_t seed) {
  const std::size_t n = test.schema.size();
  const SplitSizes sizes = split_sizes(n, q_frac, e_frac);
  if (count > 0 && test.rows.empty()) throw std::invalid_argument("test set has no rows");
  Rng rng(seed);
  std::vector<std::size_t> row_order(test.rows.size());
  std::iota(row_order.begin(), row_order.end(), std::size_t{0});
  std::shuffle(row_order.begin(), row_order.end(), rng);

  std::vector<QueryInstance> out;
  out.reserve(count);
  std::vector<std::size_t> vars(n);
  for (std::size_t k = 0; k < count; ++k) {
    const Assignment& row = test.rows[row_order[k % row_order.size()]];
    std::iota(vars.begin(), vars.end(), std::size_t{0});
    std::shuffle(vars.begin(), vars.end(), rng);
    QueryInstance inst{Assignment(n), Assignment(n), {}};
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t v = vars[r];
      if (r < sizes.query)
        inst.query[v] = row[v];
      else if (r < sizes.query + sizes.evidence)
        inst.evidence[v] = row[v];
      else
        inst.hidden.push_back(v);
    }
    std::sort(inst.hidden.begin(), inst.hidden.end());
    out.push_back(std::move(inst));
  }
  return out;
}

void finalize_means(EvalReport& report) {
  double cll = 0.0, cmll = 0.0, best = 0.0;
  for (const InstanceScore& s : report.per_instance) {
    cll += s.cll;
    cmll += s.cmll;
    best += s.best;
  }
  const double count = static_cast<double>(std::max<std::size_t>(1, report.per_instance.size()));
  report.mean_cll = cll / count;
  report.mean_cmll = cmll / count;
  report.mean_max = best / count;
}

namespace {

double infer_fracs(std::span<const QueryInstance> instances, bool query) {
  if (instances.empty()) return 0.0;
  const QueryInstance& first = instances.front();
  std::size_t set = 0;
  for (std::size_t i = 0; i < first.query.size(); ++i)
    set += query ? first.query.is_set(i) : first.evidence.is_set(i);
  return static_cast<double>(set) / static_cast<double>(first.query.size());
}

}  // namespace

EvalReport evaluate(const LdfmModel& model, std::span<const QueryInstance> instances,
                    const SamplerConfig& config, std::size_t workers) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.sampler = config;
  report.q_frac = infer_fracs(instances, true);
  report.e_frac = infer_fracs(instances, false);
  report.per_instance.resize(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t k) {
    SamplerConfig local = config;
    local.seed = derive_seed(config.seed, k);
    const std::vector<Assignment> samples = run_chain(model, instances[k], local);
    InstanceScore& s = report.per_instance[k];
    s.cll = normalized_cll(samples, instances[k]);
    s.cmll = normalized_cmll(samples, instances[k], model.schema());
    s.best = std::max(s.cll, s.cmll);
  });
  finalize_means(report);
  report.seconds_infer =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

IndependenceBaseline IndependenceBaseline::fit(const Dataset& train) {
  IndependenceBaseline b;
  const VariableSchema& schema = train.schema;
  b.log_marginals_.resize(schema.size());
  for (std::size_t v = 0; v < schema.size(); ++v) {
    std::vector<double> counts(schema.cardinality(v), 1.0);
    for (const Assignment& x : train.rows) counts[static_cast<std::size_t>(x[v])] += 1.0;
    const double total = static_cast<double>(train.rows.size() + schema.cardinality(v));
    for (double& c : counts) c = std::log(c / total);
    b.log_marginals_[v] = std::move(counts);
  }
  return b;
}

EvalReport evaluate_baseline(const IndependenceBaseline& baseline,
                             std::span<const QueryInstance> instances) {
  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.q_frac = infer_fracs(instances, true);
  report.e_frac = infer_fracs(instances, false);
  for (const QueryInstance& inst : instances) {
    const std::vector<std::size_t> q = inst.query_variables();
    if (q.empty()) throw std::invalid_argument("query has no variables");
    double total = 0.0;
    for (std::size_t v : q) total += baseline.log_marginal(v, static_cast<std::size_t>(inst.query[v]));
    const double normalized = total / static_cast<double>(q.size());
    report.per_instance.push_back({normalized, normalized, normalized});
  }
  finalize_means(report);
  report.seconds_infer =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "instances: " << report.per_instance.size() << '\n'
      << "q_frac: " << report.q_frac << '\n'
      << "e_frac: " << report.e_frac << '\n'
      << "mean_cll: " << report.mean_cll << '\n'
      << "mean_cmll: " << report.mean_cmll << '\n'
      << "mean_max: " << report.mean_max << '\n'
      << "seconds_train: " << report.seconds_train << '\n'
      << "seconds_infer: " << report.seconds_infer << '\n';
  return out.str();
}

}  // namespace ldfm
