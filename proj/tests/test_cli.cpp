#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "ghyp/casestudy.hpp"
#include "ghyp/cli.hpp"
#include "ghyp/model.hpp"
#include "ghyp/sampler.hpp"

using namespace ghyp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "ghyp");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ghyp_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kZkc = default_zkc_path();

// Two dense groups of five with a few links between them.
fs::path write_two_block_graph(const fs::path& dir) {
  std::ofstream g(dir / "blocks.tsv");
  std::ofstream p(dir / "blocks.part");
  for (int i = 0; i < 10; ++i) {
    p << "v" << i << "\t" << (i < 5 ? "left" : "right") << "\n";
    for (int j = i + 1; j < 10; ++j) g << "v" << i << "\tv" << j << "\t" << ((i < 5) == (j < 5) ? 4 : 1) << "\n";
  }
  return dir / "blocks.tsv";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("selection test on the karate club") {
  const auto r = run({"test", "--graph", kZkc, "--null", "regular", "--alt", "config", "--samples", "1000", "--seed", "7"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["p_beta"].get<double>() < 1e-20);
  CHECK(doc["seed"] == 7);
  CHECK(doc["s"] == 1000);
  CHECK(doc["command"] == "test");
}

TEST_CASE("reports carry every key the schema requires") {
  const auto schema = nlohmann::json::parse(slurp(fs::path(GHYP_SOURCE_DIR) / "docs" / "test_report.schema.json"));
  for (const auto& cmd : {"test", "gof"}) {
    const auto r = run({cmd, "--graph", kZkc, "--null", "regular", "--samples", "100", "--seed", "1"});
    REQUIRE(r.code == kExitOk);
    const auto doc = nlohmann::json::parse(r.out);
    for (const auto& key : schema["required"]) CHECK(doc.contains(key.get<std::string>()));
    for (const auto& key : schema["properties"]["convention"]["required"]) {
      CHECK(doc["convention"].contains(key.get<std::string>()));
    }
    CHECK(doc["schema_version"] == schema["properties"]["schema_version"]["const"]);
    CHECK(doc["null_model"].contains("kind"));
  }
}

TEST_CASE("fixed seed gives byte-identical output") {
  const std::vector<std::string> args{"gof", "--graph", kZkc, "--null", "config", "--samples", "200", "--seed", "3"};
  CHECK(run(args).out == run(args).out);
  auto timed = args;
  timed.push_back("--timings");
  CHECK(nlohmann::json::parse(run(timed).out)["timings_ms"].contains("total"));
}

TEST_CASE("generated seeds are printed") {
  const auto r = run({"test", "--graph", kZkc, "--samples", "50"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(r.err.find("seed: " + std::to_string(doc["seed"].get<std::uint64_t>())) != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto missing = run({"test", "--graph", "/nonexistent/graph.tsv", "--seed", "1"});
  CHECK(missing.code == kExitIo);
  CHECK(missing.err.find("/nonexistent/graph.tsv") != std::string::npos);

  const auto reversed = run({"test", "--graph", kZkc, "--null", "config", "--alt", "regular", "--seed", "1"});
  CHECK(reversed.code == kExitStatistical);
  CHECK(reversed.err.find("nested") != std::string::npos);

  CHECK(run({"test", "--graph", kZkc, "--samples", "10", "--seed", "1"}).code == kExitStatistical);
  CHECK(run({"test", "--graph", kZkc, "--null", "bogus", "--seed", "1"}).code == kExitStatistical);
  CHECK(run({"casestudy", "no-such-study", "--seed", "1"}).code == kExitStatistical);
  CHECK(run({"frobnicate"}).code == kExitStatistical);
  CHECK(run({"test", "--format", "xml"}).code == kExitStatistical);
  CHECK(run({"--help"}).code == kExitOk);

  const auto dir = scratch_dir("bad");
  std::ofstream(dir / "bad.tsv") << "a b\nc\n";
  const auto bad = run({"test", "--graph", (dir / "bad.tsv").string(), "--seed", "1"});
  CHECK(bad.code == kExitIo);
  CHECK(bad.err.find("line 2") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("goodness of fit") {
  const auto trivial = run({"gof", "--graph", kZkc, "--null", "full", "--seed", "1"});
  REQUIRE(trivial.code == kExitOk);
  const auto doc = nlohmann::json::parse(trivial.out);
  CHECK(doc["D"] == 0.0);
  CHECK(doc["p_beta"] == 1.0);

  const auto dir = scratch_dir("block");
  const auto graph = write_two_block_graph(dir);
  const std::string part = (dir / "blocks.part").string();
  const auto block = run({"gof", "--graph", graph.string(), "--null", "block", "--partition", part, "--samples", "100",
                          "--seed", "2"});
  REQUIRE(block.code == kExitOk);
  const auto report = nlohmann::json::parse(block.out);
  CHECK(report["null_model"]["kind"] == "block");
  CHECK(report["p_beta"].get<double>() >= 0.0);
  CHECK(report["p_beta"].get<double>() <= 1.0);

  const auto selection = run({"test", "--graph", graph.string(), "--null", "config", "--alt", "block", "--partition",
                              part, "--samples", "200", "--seed", "2"});
  REQUIRE(selection.code == kExitOk);
  CHECK(nlohmann::json::parse(selection.out)["p_beta"].get<double>() < 0.01);

  CHECK(run({"test", "--graph", graph.string(), "--null", "config", "--alt", "block", "--seed", "2"}).code ==
        kExitStatistical);
  fs::remove_all(dir);
}

TEST_CASE("null samples as CSV") {
  const auto r = run({"test", "--graph", kZkc, "--samples", "40", "--seed", "9", "--format", "csv"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "D");
  int n = 0;
  while (std::getline(lines, line)) {
    CHECK(std::stod(line) >= 0.0);
    ++n;
  }
  CHECK(n == 40);
}

TEST_CASE("null distribution histogram and sidecar") {
  const auto dir = scratch_dir("nulldist");
  const auto csv = dir / "zkc.csv";
  const auto r = run({"nulldist", "--graph", kZkc, "--samples", "1000", "--seed", "4", "--bins", "25", "--out",
                      csv.string()});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line == "bin_left,bin_right,empirical_density,beta_density,chi2_density");
  double mass[3] = {0, 0, 0};
  int rows = 0;
  while (std::getline(lines, line)) {
    double v[5];
    char sep;
    std::istringstream row(line);
    row >> v[0] >> sep >> v[1] >> sep >> v[2] >> sep >> v[3] >> sep >> v[4];
    for (int k = 0; k < 3; ++k) mass[k] += v[2 + k] * (v[1] - v[0]);
    ++rows;
  }
  CHECK(rows == 25);
  for (double m : mass) CHECK(m == doctest::Approx(1.0).epsilon(0.01));

  const auto side = nlohmann::json::parse(slurp(dir / "zkc.csv.json"));
  for (const char* key : {"alpha", "beta", "M", "nu", "ks_beta", "ks_chi2"}) CHECK(side.contains(key));
  CHECK(side["nu"] == 33);
  CHECK(side["ks_beta"]["p_value"].get<double>() > 0.05);
  fs::remove_all(dir);
}

TEST_CASE("validation sweep CSV") {
  const auto dir = scratch_dir("validate");
  const auto graph = write_two_block_graph(dir);
  const std::vector<std::string> args{"validate", "--graph", graph.string(), "--sizes", "60", "--reps", "3",
                                      "--reference", "300", "--seed", "8"};
  const auto a = run(args);
  REQUIRE(a.code == kExitOk);
  CHECK(a.out.rfind("s,median_p,q25_p,q75_p,median_statistic\n60,", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 2);
  CHECK(run(args).out == a.out);

  const auto two = run({"validate", "--geometric", "15", "60", "--sizes", "50,100", "--reps", "2", "--reference",
                        "200", "--seed", "1"});
  REQUIRE(two.code == kExitOk);
  CHECK(std::count(two.out.begin(), two.out.end(), '\n') == 3);
  fs::remove_all(dir);
}

TEST_CASE("case study output") {
  const auto r = run({"casestudy", "zkc-selection", "--samples", "200", "--seed", "7"});
  REQUIRE(r.code == kExitOk);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["name"] == "zkc-selection");
  CHECK(doc["paper"]["D"] == 300.338);
  CHECK(std::abs(doc["D"].get<double>() - 300.338) < 3.0);
}

TEST_CASE("sampling to a directory") {
  const auto dir = scratch_dir("sample");
  const auto out = dir / "reps";
  const auto r = run({"sample", "--graph", kZkc, "--null", "config", "--count", "3", "--seed", "5", "--out",
                      out.string()});
  REQUIRE(r.code == kExitOk);
  const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
  REQUIRE(manifest["files"].size() == 3);
  CHECK(manifest["seed"] == 5);

  const auto zkc = load_zkc();
  const auto model = fit_configuration(zkc);
  for (int i = 0; i < 3; ++i) {
    const std::string name = manifest["files"][i]["file"];
    CHECK(name == "replicate_000" + std::to_string(i) + ".tsv");
    CHECK(manifest["files"][i]["seed"] == derive_seed(5, i));
    LoadOptions options;
    const auto g = load_edgelist_file((out / name).string(), options);
    CHECK(g.edge_count() == 231);
    CHECK(g.dense_matrix() == sample_graph(model, 231, derive_seed(5, i), zkc.labels()).dense_matrix());
  }

  // Round trip through a model file.
  std::ofstream(dir / "model.json") << to_json(model).dump();
  const auto via_model = run({"sample", "--model", (dir / "model.json").string(), "--edges", "231", "--count", "1",
                              "--seed", "5", "--out", (dir / "m").string()});
  REQUIRE(via_model.code == kExitOk);
  const auto g = load_edgelist_file((dir / "m" / "replicate_0000.tsv").string(), {});
  CHECK(g.edge_count() == 231);

  std::ofstream(dir / "blocker") << "x";
  CHECK(run({"sample", "--graph", kZkc, "--count", "1", "--seed", "1", "--out", (dir / "blocker" / "sub").string()})
            .code == kExitIo);
  std::ofstream(dir / "broken.json") << "{";
  CHECK(run({"sample", "--model", (dir / "broken.json").string(), "--edges", "3", "--seed", "1", "--out",
             (dir / "z").string()})
            .code == kExitIo);
  fs::remove_all(dir);
}

TEST_CASE("sampled degrees average to the model expectation") {
  const auto dir = scratch_dir("degrees");
  const auto r = run({"sample", "--graph", kZkc, "--null", "config", "--count", "400", "--seed", "12", "--out",
                      dir.string()});
  REQUIRE(r.code == kExitOk);
  const auto zkc = load_zkc();
  const auto model = fit_configuration(zkc);
  const auto expected = expected_counts(model, zkc.edge_count());
  std::vector<double> expected_degree(34, 0.0);
  for (std::size_t k = 0; k < expected.size(); ++k) {
    expected_degree[model.layout[k].source] += expected[k];
    expected_degree[model.layout[k].target] += expected[k];
  }
  std::vector<double> sum(34, 0.0);
  std::vector<double> sum2(34, 0.0);
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  REQUIRE(manifest["files"].size() == 400);
  for (const auto& entry : manifest["files"]) {
    LoadOptions options;
    const auto g = load_edgelist_file((dir / entry["file"].get<std::string>()).string(), options);
    REQUIRE(g.labels() == zkc.labels());
    const auto k = degrees(g).out;
    for (std::size_t i = 0; i < 34; ++i) {
      sum[i] += static_cast<double>(k[i]);
      sum2[i] += static_cast<double>(k[i] * k[i]);
    }
  }
  for (std::size_t i = 0; i < 34; ++i) {
    const double mu = sum[i] / 400;
    const double se = std::sqrt(std::max(sum2[i] / 400 - mu * mu, 1e-12) / 400);
    CAPTURE(i);
    CHECK(std::abs(mu - expected_degree[i]) < 4 * se);
  }
  fs::remove_all(dir);
}

TEST_CASE("the installed binary follows the exit-code contract") {
  const std::string bin = GHYP_CLI_PATH;
  const auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " test --graph /nonexistent.tsv --seed 1") == kExitIo);
  CHECK(status(bin + " test --graph " + kZkc + " --null config --alt regular --seed 1") == kExitStatistical);
  CHECK(status(bin + " gof --graph " + kZkc + " --null full --seed 1") == kExitOk);
}

}
