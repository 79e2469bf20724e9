#include "ldfm/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldfm/dataset.hpp"
#include "ldfm/em.hpp"
#include "ldfm/error.hpp"
#include "ldfm/eval.hpp"
#include "ldfm/log.hpp"
#include "ldfm/matrix_tree.hpp"
#include "ldfm/mcmc.hpp"
#include "ldfm/model_io.hpp"
#include "ldfm/network.hpp"
#include "ldfm/oracle.hpp"
#include "ldfm/rng.hpp"

namespace ldfm {

namespace {

struct SamplerFlags {
  std::string sampler = "gibbs";
  std::size_t samples = 1000;
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  std::size_t chains = 1;

  void attach(CLI::App& cmd) {
    cmd.add_option("--sampler", sampler, "MCMC sampler")
        ->check(CLI::IsMember({"gibbs", "tree"}))
        ->capture_default_str();
    cmd.add_option("--samples", samples, "recorded samples per chain")->capture_default_str();
    cmd.add_option("--burn-in", burn_in, "discarded sweeps (gibbs) or steps (tree)");
    cmd.add_option("--thin", thin, "sweeps or steps between recorded samples")->capture_default_str();
    cmd.add_option("--chains", chains, "independent chains")->capture_default_str();
  }

  SamplerConfig config(std::uint64_t seed) const {
    SamplerConfig c;
    c.sampler = parse_sampler(sampler);
    c.samples = samples;
    c.burn_in = burn_in;
    c.thin = thin;
    c.chains = chains;
    c.seed = seed;
    return c;
  }
};

std::optional<VariableSchema> maybe_schema(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return load_schema(path);
}

LdfmModel load_model_logged(const std::string& path, const Logger& log, ModelMetadata* metadata = nullptr) {
  LoadedModel loaded = load_model(path);
  for (const auto& w : loaded.warnings) log.error("warning: " + path + ": " + w);
  if (metadata) *metadata = loaded.metadata;
  return std::move(loaded.model);
}

// "name=label,name=label" -> partial assignment.
Assignment parse_values(const VariableSchema& schema, const std::string& text, const char* what) {
  Assignment x(schema.size());
  std::stringstream items(text);
  std::string item;
  while (std::getline(items, item, ',')) {
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(std::string(what) + " item '" + item + "' is not name=value");
    const auto var = schema.find_variable(item.substr(0, eq));
    if (!var) throw DataError(std::string(what) + " names unknown variable '" + item.substr(0, eq) + "'");
    const auto value = schema.find_value(*var, item.substr(eq + 1));
    if (!value) throw DataError(std::string(what) + " has unknown value '" + item.substr(eq + 1) + "'");
    if (x.is_set(*var)) throw std::invalid_argument(std::string(what) + " sets '" + item.substr(0, eq) + "' twice");
    x[*var] = static_cast<int>(*value);
  }
  return x;
}

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent dependency forest models: training, inference and self-checks", "ldfm"};
  app.require_subcommand(1);
  const Logger log(err, log_level_from_env());

  // train
  std::string data_path, schema_path, out_path, model_path, variant = "plain",
                                                             smoothing = "additive";
  TrainConfig train;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  auto* cmd_train = app.add_subcommand("train", "learn model weights from a dataset with EM");
  cmd_train->add_option("--data", data_path, "training CSV")->required();
  cmd_train->add_option("--schema", schema_path, "schema sidecar");
  cmd_train->add_option("--out", out_path, "model output path")->required();
  cmd_train->add_option("--variant", variant)->check(CLI::IsMember({"plain", "stop"}))->capture_default_str();
  cmd_train->add_option("--iters", train.max_iters)->capture_default_str();
  cmd_train->add_option("--tol", train.rel_tol, "relative objective improvement to stop at")->capture_default_str();
  cmd_train->add_option("--smoothing", smoothing)
      ->check(CLI::IsMember({"none", "additive", "sparsity"}))
      ->capture_default_str();
  cmd_train->add_option("--eps", train.eps, "additive smoothing mass")->capture_default_str();
  cmd_train->add_option("--kappa", train.kappa, "sparsity discount")->capture_default_str();
  cmd_train->add_option("--workers", workers, "E-step threads (0 = all cores)");
  cmd_train->add_option("--seed", seed, "reserved; EM is deterministic");

  // eval
  double q_frac = 0.4, e_frac = 0.3;
  std::size_t instances = 1000;
  std::string baseline_path;
  SamplerFlags eval_sampler;
  auto* cmd_eval = app.add_subcommand("eval", "score a model on query instances drawn from a test set");
  cmd_eval->add_option("--model", model_path)->required();
  cmd_eval->add_option("--data", data_path, "test CSV")->required();
  cmd_eval->add_option("--q-frac", q_frac)->capture_default_str();
  cmd_eval->add_option("--e-frac", e_frac)->capture_default_str();
  cmd_eval->add_option("--instances", instances)->capture_default_str();
  cmd_eval->add_option("--seed", seed)->required();
  cmd_eval->add_option("--workers", workers, "concurrent instances (0 = all cores)");
  cmd_eval->add_option("--out", out_path, "also write the report here");
  cmd_eval->add_option("--baseline", baseline_path,
                       "training CSV; also report the independence baseline");
  eval_sampler.attach(*cmd_eval);

  // query
  std::string evidence_text, query_text;
  SamplerFlags query_sampler;
  auto* cmd_query = app.add_subcommand("query", "estimate P(query | evidence) by MCMC");
  cmd_query->add_option("--model", model_path)->required();
  cmd_query->add_option("--query", query_text, "name=value[,name=value...]")->required();
  cmd_query->add_option("--evidence", evidence_text, "name=value[,name=value...]");
  cmd_query->add_option("--seed", seed)->required();
  query_sampler.attach(*cmd_query);

  // sample
  std::size_t sample_count = 0;
  std::optional<std::size_t> sample_burn_in;
  std::size_t sample_thin = 1;
  auto* cmd_sample = app.add_subcommand("sample", "draw unconditional samples with the tree-augmented chain");
  cmd_sample->add_option("--model", model_path)->required();
  cmd_sample->add_option("--samples", sample_count)->required();
  cmd_sample->add_option("--burn-in", sample_burn_in);
  cmd_sample->add_option("--thin", sample_thin)->capture_default_str();
  cmd_sample->add_option("--seed", seed)->required();
  cmd_sample->add_option("--out", out_path, "CSV output (default stdout)");

  // gen-data
  std::size_t net_size = 8;
  std::size_t rows = 0;
  auto* cmd_gen = app.add_subcommand("gen-data", "forward-sample a bundled ground-truth network");
  cmd_gen->add_option("--n", net_size, "network size: 8, 11 or 20 variables")->capture_default_str();
  cmd_gen->add_option("--samples", rows, "rows to draw")->required();
  cmd_gen->add_option("--seed", seed)->required();
  cmd_gen->add_option("--out", out_path, "CSV output")->required();
  cmd_gen->add_option("--schema", schema_path, "also write the schema sidecar here");

  // check
  std::size_t check_n = 4;
  std::size_t trials = 100;
  auto* cmd_check = app.add_subcommand("check", "compare the matrix-tree numerics with brute-force enumeration");
  cmd_check->add_option("--n", check_n)->capture_default_str();
  cmd_check->add_option("--trials", trials)->capture_default_str();
  cmd_check->add_option("--seed", seed)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (cmd_train->parsed()) {
      train.variant = parse_variant(variant);
      train.smoothing = parse_smoothing(smoothing);
      train.workers = workers;
      train.seed = seed;
      const Dataset data = load_dataset(data_path, maybe_schema(schema_path));
      const auto start = std::chrono::steady_clock::now();
      TrainResult result = train_em(data.rows, data.schema, train, [&](const IterationRecord& r) {
        log.info(format_progress(r));
      });
      ModelMetadata meta;
      meta.seconds_train = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      save_model(out_path, result.model, meta);
      log.info("wrote " + out_path);
      return kExitOk;
    }

    if (cmd_eval->parsed()) {
      ModelMetadata meta;
      const LdfmModel model = load_model_logged(model_path, log, &meta);
      const Dataset test = load_dataset(data_path, model.schema());
      const std::vector<QueryInstance> qs = make_query_instances(test, q_frac, e_frac, instances, seed);
      EvalReport report = evaluate(model, qs, eval_sampler.config(seed), workers);
      report.q_frac = q_frac;
      report.e_frac = e_frac;
      report.seconds_train = meta.seconds_train;
      std::string text = format_report(report);
      if (!baseline_path.empty()) {
        const auto start = std::chrono::steady_clock::now();
        const IndependenceBaseline baseline =
            IndependenceBaseline::fit(load_dataset(baseline_path, model.schema()));
        const double fit_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        EvalReport base = evaluate_baseline(baseline, qs);
        base.q_frac = q_frac;
        base.e_frac = e_frac;
        base.seconds_train = fit_seconds;
        text += "---\n" + format_report(base);
      }
      out << text;
      if (!out_path.empty()) {
        std::ofstream file(out_path);
        if (!file) throw DataError("cannot write report '" + out_path + "'");
        file << text;
      }
      return kExitOk;
    }

    if (cmd_query->parsed()) {
      const LdfmModel model = load_model_logged(model_path, log);
      const VariableSchema& schema = model.schema();
      QueryInstance inst{parse_values(schema, evidence_text, "--evidence"),
                         parse_values(schema, query_text, "--query"), {}};
      for (std::size_t i = 0; i < schema.size(); ++i) {
        if (inst.query.is_set(i) && inst.evidence.is_set(i))
          throw std::invalid_argument("'" + schema.variable(i).name + "' is both query and evidence");
        if (!inst.query.is_set(i) && !inst.evidence.is_set(i)) inst.hidden.push_back(i);
      }
      const std::vector<Assignment> samples = run_chain(model, inst, query_sampler.config(seed));
      const std::vector<std::size_t> qv = inst.query_variables();
      std::size_t matches = 0;
      for (const Assignment& x : samples) {
        bool all = true;
        for (std::size_t i : qv) all = all && x[i] == inst.query[i];
        matches += all;
      }
      out << "samples: " << samples.size() << '\n'
          << "probability: " << format_double(static_cast<double>(matches) / static_cast<double>(samples.size())) << '\n'
          << "cll: " << format_double(estimate_cll(samples, inst)) << '\n'
          << "cmll: " << format_double(estimate_cmll(samples, inst, schema)) << '\n';
      return kExitOk;
    }

    if (cmd_sample->parsed()) {
      const LdfmModel model = load_model_logged(model_path, log);
      const std::size_t n = model.schema().size();
      QueryInstance everything{Assignment(n), Assignment(n), {}};
      for (std::size_t i = 0; i < n; ++i) everything.hidden.push_back(i);
      SamplerConfig config;
      config.sampler = SamplerKind::kTreeAugmented;
      config.samples = sample_count;
      config.burn_in = sample_burn_in;
      config.thin = sample_thin;
      config.seed = seed;
      const Dataset drawn{model.schema(), run_chain(model, everything, config)};
      if (out_path.empty())
        write_dataset(out, drawn);
      else
        save_dataset(out_path, drawn);
      return kExitOk;
    }

    if (cmd_gen->parsed()) {
      const GroundTruthNet net = fixture_network_by_size(net_size);
      save_dataset(out_path, forward_sample(net, rows, seed));
      if (!schema_path.empty()) save_schema(schema_path, net.schema);
      log.info("wrote " + std::to_string(rows) + " rows to " + out_path);
      return kExitOk;
    }

    if (cmd_check->parsed()) {
      if (check_n < 1 || check_n > kMaxOracleNodes)
        throw std::invalid_argument("--n must be between 1 and " + std::to_string(kMaxOracleNodes));
      Rng rng(seed);
      double worst_log_z = 0.0;
      double worst_post = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        AssignmentGraph g(check_n);
        for (std::size_t i = 0; i <= check_n; ++i)
          for (std::size_t j = 1; j <= check_n; ++j)
            if (i != j) g.set_weight(i, j, 0.01 + 0.99 * rng.uniform());
        const TreeMarginals fast = tree_marginals(g);
        const LogPartition slow_z = brute_log_partition(g);
        const EdgePosteriors slow_post = brute_edge_posteriors(g);
        worst_log_z = std::max(worst_log_z, std::abs(fast.partition.log_z - slow_z.log_z));
        for (std::size_t i = 0; i <= check_n; ++i)
          for (std::size_t j = 1; j <= check_n; ++j)
            worst_post = std::max(worst_post, std::abs(fast.posteriors(i, j) - slow_post(i, j)));
      }
      const bool pass = worst_log_z < 1e-9 && worst_post < 1e-9;
      out << "n: " << check_n << '\n'
          << "trials: " << trials << '\n'
          << "max_abs_error_log_z: " << format_double(worst_log_z) << '\n'
          << "max_abs_error_posterior: " << format_double(worst_post) << '\n'
          << "status: " << (pass ? "pass" : "fail") << '\n';
      return pass ? kExitOk : kExitNumeric;
    }
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ldfm
