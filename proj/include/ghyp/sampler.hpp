#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ghyp/model.hpp"
#include "ghyp/multigraph.hpp"

namespace ghyp {

// 64-bit Mersenne twister with a portable uniform double (the standard
// distributions are implementation-defined, which would break reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Seed of replicate `index` under `master`; a pure function of both.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct SampleBatchConfig {
  std::size_t count = 1;
  std::uint64_t master_seed = 0;
  int worker_hint = 0;  // 0: GHYP_THREADS or hardware concurrency
};

// Sequential biased-urn draw of m edges: each step picks dyad k with
// probability ∝ Ω_k · max(Ξ_k − drawn_k, 0).
std::vector<std::int64_t> sample_counts(const ModelSpec& model, std::int64_t m, Rng& rng);

MultiGraph sample_graph(const ModelSpec& model, std::int64_t m, std::uint64_t seed,
                        const std::vector<std::string>& labels = {});

// Replicate i equals sample_graph(model, m, derive_seed(master_seed, i)).
std::vector<MultiGraph> sample_batch(const ModelSpec& model, std::int64_t m, const SampleBatchConfig& cfg,
                                     const std::vector<std::string>& labels = {});

struct GeometricGraph {
  std::vector<std::int64_t> target_degrees;
  ModelSpec model;
  MultiGraph graph;
};

// Undirected, no self-loops: geometric degrees with mean 2·target_m/n,
// configuration Ξ from them, then one sampled graph with m = round(Σk / 2).
GeometricGraph generate_geometric_cm(std::size_t n, std::int64_t target_m, std::uint64_t seed);
MultiGraph generate_geometric_cm_graph(std::size_t n, std::int64_t target_m, std::uint64_t seed);

}  // namespace ghyp
