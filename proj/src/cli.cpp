#include "ghyp/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ghyp/casestudy.hpp"
#include "ghyp/error.hpp"
#include "ghyp/lrtest.hpp"
#include "ghyp/sampler.hpp"
#include "ghyp/validation.hpp"

namespace ghyp {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
  std::string graph_path;
  bool directed = false;
  bool undirected = false;
  std::string null_kind = "regular";
  std::string alt_kind = "configuration";
  std::string partition_path;
  std::size_t samples = kDefaultSamples;
  std::optional<std::uint64_t> seed;
  std::size_t reps = 0;
  std::string out_path;
  std::string format = "json";
  double quad_tol = QuadratureConfig{}.relative_tolerance;
  int threads = 0;
  bool timings = false;
  // nulldist
  std::size_t bins = 40;
  std::string sidecar_path;
  // validate
  std::vector<std::size_t> sizes{250, 500, 1000, 2000};
  std::size_t reference = 20000;
  std::vector<std::int64_t> geometric;
  // casestudy
  std::string case_name;
  // sample
  std::string model_path;
  std::int64_t edges = 0;
  std::size_t count = 1;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t resolve_seed(const RunConfig& cfg, std::ostream& err) {
  if (cfg.seed) return *cfg.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << seed << "\n";
  return seed;
}

QuadratureConfig quadrature(const RunConfig& cfg) {
  QuadratureConfig q;
  q.relative_tolerance = cfg.quad_tol;
  q.validate();
  return q;
}

MultiGraph load_graph(const RunConfig& cfg) {
  if (cfg.graph_path.empty()) throw DomainError("--graph is required");
  LoadOptions options;
  options.directed = cfg.directed;
  return load_edgelist_file(cfg.graph_path, options);
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out_path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + cfg.out_path + "'");
  file << text;
  if (!file) throw IoError("write failed for '" + cfg.out_path + "'");
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot write '" + path + "'");
  file << text;
  if (!file) throw IoError("write failed for '" + path + "'");
}

std::string dump(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

nlohmann::json ks_json(const KSReport& ks) {
  return {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n", ks.sample_size}};
}

struct PreparedTest {
  MultiGraph graph;
  std::optional<Partition> partition;
  TestOptions options;
};

PreparedTest prepare_test(const RunConfig& cfg, bool gof, std::ostream& err) {
  PreparedTest prep{load_graph(cfg), std::nullopt, {}};
  if (!cfg.partition_path.empty()) prep.partition = load_partition_file(cfg.partition_path, prep.graph);
  TestOptions& t = prep.options;
  t.null_kind = parse_model_kind(cfg.null_kind);
  t.alt_kind = gof ? ModelKind::full : parse_model_kind(cfg.alt_kind);
  t.samples = cfg.samples;
  t.quadrature = quadrature(cfg);
  t.workers = cfg.threads;
  t.partition = prep.partition ? &*prep.partition : nullptr;
  require_nested(t.null_kind, t.alt_kind);
  if ((t.null_kind == ModelKind::block || t.alt_kind == ModelKind::block) && !t.partition) {
    throw DomainError("block models need --partition");
  }
  t.seed = resolve_seed(cfg, err);
  return prep;
}

std::string samples_csv(const NullDistribution& nd) {
  std::string text = "D\n";
  for (double d : nd.samples) text += fmt(d) + "\n";
  return text;
}

int cmd_test(const RunConfig& cfg, bool gof, std::ostream& out, std::ostream& err) {
  PreparedTest prep = prepare_test(cfg, gof, err);
  TestReport report = gof ? gof_test(prep.graph, prep.options) : lr_test(prep.graph, prep.options);
  if (cfg.format == "csv") {
    emit(cfg, samples_csv(report.null), out);
    return kExitOk;
  }
  nlohmann::json doc = to_json(report);
  // Wall-clock times would break byte-for-byte reproducibility.
  if (!cfg.timings) doc["timings_ms"] = nlohmann::json::object();
  emit(cfg, dump(doc), out);
  return kExitOk;
}

int cmd_nulldist(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  PreparedTest prep = prepare_test(cfg, false, err);
  if (cfg.bins == 0) throw DomainError("--bins must be positive");
  TestReport report = lr_test(prep.graph, prep.options);
  if (report.null.samples.empty()) throw StatisticalError("identical models: the null distribution is a point mass at 0");
  const auto rows = null_histogram(report.null, cfg.bins);
  std::string csv = "bin_left,bin_right,empirical_density,beta_density,chi2_density\n";
  for (const auto& r : rows) {
    csv += fmt(r.left) + "," + fmt(r.right) + "," + fmt(r.empirical_density) + "," + fmt(r.beta_density) + "," +
           fmt(r.chi2_density) + "\n";
  }
  const auto ks = validate_null(report.null);
  nlohmann::json side;
  side["schema_version"] = kReportSchemaVersion;
  side["command"] = "nulldist";
  side["null_model"] = std::string(to_string(report.null_kind));
  side["alt_model"] = std::string(to_string(report.alt_kind));
  side["D"] = report.statistic.deviance;
  side["p_beta"] = report.p_beta;
  side["p_chi2"] = report.p_chi2;
  side["alpha"] = report.null.beta.alpha;
  side["beta"] = report.null.beta.beta;
  side["M"] = report.null.beta.upper;
  side["nu"] = report.nu;
  side["s"] = report.null.samples.size();
  side["seed"] = report.null.seed;
  side["bins"] = cfg.bins;
  side["ks_beta"] = ks_json(ks.beta);
  side["ks_chi2"] = ks_json(ks.chi2);
  emit(cfg, csv, out);
  std::string sidecar = cfg.sidecar_path;
  if (sidecar.empty() && !cfg.out_path.empty()) sidecar = cfg.out_path + ".json";
  if (sidecar.empty()) {
    err << "note: no --out or --sidecar given, fitted parameters not written\n";
  } else {
    write_file(sidecar, dump(side));
  }
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.sizes.empty()) throw DomainError("--sizes must list at least one sample size");
  const std::uint64_t seed = resolve_seed(cfg, err);
  MultiGraph g = [&] {
    if (!cfg.geometric.empty()) {
      if (!cfg.graph_path.empty()) throw DomainError("give either --graph or --geometric, not both");
      if (cfg.geometric[0] < 2 || cfg.geometric[1] < 1) throw DomainError("--geometric needs N >= 2 and M >= 1");
      return generate_geometric_cm_graph(static_cast<std::size_t>(cfg.geometric[0]), cfg.geometric[1],
                                         derive_seed(seed, 0xfeedULL));
    }
    return load_graph(cfg);
  }();
  TestOptions t;
  t.null_kind = parse_model_kind(cfg.null_kind);
  t.alt_kind = parse_model_kind(cfg.alt_kind);
  require_nested(t.null_kind, t.alt_kind);
  t.seed = seed;
  t.quadrature = quadrature(cfg);
  t.workers = cfg.threads;
  std::optional<Partition> partition;
  if (!cfg.partition_path.empty()) {
    partition = load_partition_file(cfg.partition_path, g);
    t.partition = &*partition;
  }
  SweepOptions sweep;
  sweep.sizes = cfg.sizes;
  sweep.reps = cfg.reps == 0 ? 50 : cfg.reps;
  sweep.reference = cfg.reference;
  const auto rows = ks_sweep(g, t, sweep);
  std::string csv = "s,median_p,q25_p,q75_p,median_statistic\n";
  for (const auto& r : rows) {
    csv += std::to_string(r.s) + "," + fmt(r.median_p) + "," + fmt(r.q25_p) + "," + fmt(r.q75_p) + "," +
           fmt(r.median_statistic) + "\n";
  }
  emit(cfg, csv, out);
  return kExitOk;
}

int cmd_casestudy(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& names = case_study_names();
  if (std::find(names.begin(), names.end(), cfg.case_name) == names.end()) {
    throw DomainError("unknown case study '" + cfg.case_name + "'");
  }
  CaseStudyOptions o;
  o.seed = resolve_seed(cfg, err);
  if (cfg.reps > 0) o.reps = cfg.reps;
  o.samples = cfg.samples;
  if (!cfg.graph_path.empty()) o.zkc_path = cfg.graph_path;
  o.quadrature = quadrature(cfg);
  o.workers = cfg.threads;
  emit(cfg, dump(run_case_study(cfg.case_name, o)), out);
  return kExitOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out_path.empty()) throw DomainError("sample needs --out DIR");
  if (cfg.count == 0) throw DomainError("--count must be positive");
  ModelSpec model;
  std::int64_t m = cfg.edges;
  std::vector<std::string> labels;
  if (!cfg.model_path.empty()) {
    if (!cfg.graph_path.empty()) throw DomainError("give either --model or --graph, not both");
    std::ifstream in(cfg.model_path);
    if (!in) throw IoError("cannot open '" + cfg.model_path + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(cfg.model_path + ": " + e.what(), 0);
    }
    model = model_from_json(doc);
    if (m <= 0) throw DomainError("--edges is required with --model");
  } else {
    const MultiGraph g = load_graph(cfg);
    std::optional<Partition> partition;
    if (!cfg.partition_path.empty()) partition = load_partition_file(cfg.partition_path, g);
    model = fit_model(parse_model_kind(cfg.null_kind), g, partition ? &*partition : nullptr);
    if (m <= 0) m = g.edge_count();
    labels = g.labels();
  }
  const std::uint64_t seed = resolve_seed(cfg, err);

  const fs::path dir(cfg.out_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + cfg.out_path + "'");

  SampleBatchConfig batch;
  batch.count = cfg.count;
  batch.master_seed = seed;
  batch.worker_hint = cfg.threads;
  const auto graphs = sample_batch(model, m, batch, labels);

  const int width = std::max<int>(4, static_cast<int>(std::to_string(cfg.count - 1).size()));
  nlohmann::json manifest;
  manifest["schema_version"] = kReportSchemaVersion;
  manifest["command"] = "sample";
  manifest["model"] = summary_json(model);
  manifest["m"] = m;
  manifest["seed"] = seed;
  manifest["count"] = cfg.count;
  manifest["files"] = nlohmann::json::array();
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    std::string index = std::to_string(i);
    index.insert(0, static_cast<std::size_t>(width) - std::min<std::size_t>(width, index.size()), '0');
    const std::string name = "replicate_" + index + ".tsv";
    std::ostringstream text;
    write_edgelist(text, graphs[i]);
    write_file((dir / name).string(), text.str());
    manifest["files"].push_back({{"file", name}, {"seed", derive_seed(seed, i)}});
  }
  write_file((dir / "manifest.json").string(), dump(manifest));
  out << "wrote " << graphs.size() << " replicate(s) to " << cfg.out_path << "\n";
  return kExitOk;
}

void add_graph_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--graph", cfg.graph_path, "Edge list: source target [count [timestamp]]");
  auto* d = sub->add_flag("--directed", cfg.directed, "Treat edges as directed");
  auto* u = sub->add_flag("--undirected", cfg.undirected, "Treat edges as undirected (default)");
  d->excludes(u);
  sub->add_option("--partition", cfg.partition_path, "Vertex-to-block file for block models");
}

void add_run_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "Master seed; printed to stderr when generated");
  sub->add_option("--out", cfg.out_path, "Output path (default stdout)");
  sub->add_option("--quad-tol", cfg.quad_tol, "Relative tolerance of the likelihood quadrature");
  sub->add_option("--threads", cfg.threads, "Worker threads (default GHYP_THREADS or all cores)");
}

void add_model_options(CLI::App* sub, RunConfig& cfg, bool with_alt) {
  sub->add_option("--null", cfg.null_kind, "Null model: regular, configuration, block, full");
  if (with_alt) sub->add_option("--alt", cfg.alt_kind, "Alternative model");
  sub->add_option("--samples", cfg.samples, "Null samples s (at least 30)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Likelihood-ratio tests for multi-edge networks under generalized hypergeometric ensembles", "ghyp"};
  app.require_subcommand(1);

  auto* test = app.add_subcommand("test", "Likelihood-ratio test of two nested models");
  add_graph_options(test, cfg);
  add_model_options(test, cfg, true);
  add_run_options(test, cfg);
  test->add_option("--format", cfg.format, "json report or csv of null samples")
      ->check(CLI::IsMember({"json", "csv"}));
  test->add_flag("--timings", cfg.timings, "Include wall-clock timings in the report");

  auto* gof = app.add_subcommand("gof", "Goodness-of-fit test against the full model");
  add_graph_options(gof, cfg);
  add_model_options(gof, cfg, false);
  add_run_options(gof, cfg);
  gof->add_option("--format", cfg.format, "json report or csv of null samples")->check(CLI::IsMember({"json", "csv"}));
  gof->add_flag("--timings", cfg.timings, "Include wall-clock timings in the report");

  auto* nulldist = app.add_subcommand("nulldist", "Histogram of the null statistic with fitted Beta and chi2 densities");
  add_graph_options(nulldist, cfg);
  add_model_options(nulldist, cfg, true);
  add_run_options(nulldist, cfg);
  nulldist->add_option("--bins", cfg.bins, "Histogram bins");
  nulldist->add_option("--sidecar", cfg.sidecar_path, "JSON with fitted parameters (default OUT.json)");

  auto* validate = app.add_subcommand("validate", "KS sweep of the Beta fit over null sample sizes");
  add_graph_options(validate, cfg);
  add_model_options(validate, cfg, true);
  add_run_options(validate, cfg);
  validate->add_option("--sizes", cfg.sizes, "Comma-separated sample sizes")->delimiter(',');
  validate->add_option("--reps", cfg.reps, "Repetitions per size (default 50)");
  validate->add_option("--reference", cfg.reference, "Size of the fixed reference sample");
  validate->add_option("--geometric", cfg.geometric, "Generate a configuration graph: N M")->expected(2);

  auto* casestudy = app.add_subcommand("casestudy", "Run a named case study");
  casestudy->add_option("name", cfg.case_name, "regular-synthetic, config-synthetic, zkc-selection, zkc-gof")
      ->required();
  casestudy->add_option("--graph", cfg.graph_path, "Karate club edge list (default: bundled)");
  casestudy->add_option("--reps", cfg.reps, "Synthetic repetitions (default 200)");
  casestudy->add_option("--samples", cfg.samples, "Null samples per test");
  add_run_options(casestudy, cfg);

  auto* sample = app.add_subcommand("sample", "Draw graphs from a fitted model");
  add_graph_options(sample, cfg);
  sample->add_option("--null", cfg.null_kind, "Model kind fitted to --graph");
  sample->add_option("--model", cfg.model_path, "Model JSON instead of --graph");
  sample->add_option("--edges", cfg.edges, "Edges per replicate (default: edges of --graph)");
  sample->add_option("--count", cfg.count, "Number of replicates");
  add_run_options(sample, cfg);

  try {
    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rev.begin(), rev.end());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitStatistical;
  }

  try {
    if (*test) return cmd_test(cfg, false, out, err);
    if (*gof) return cmd_test(cfg, true, out, err);
    if (*nulldist) return cmd_nulldist(cfg, out, err);
    if (*validate) return cmd_validate(cfg, out, err);
    if (*casestudy) return cmd_casestudy(cfg, out, err);
    if (*sample) return cmd_sample(cfg, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitStatistical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitStatistical;
}

}  // namespace ghyp
