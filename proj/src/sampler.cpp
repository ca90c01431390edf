#include "ghyp/sampler.hpp"

#include <cmath>
#include <optional>

#include "ghyp/error.hpp"
#include "ghyp/parallel.hpp"

namespace ghyp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Fenwick tree over non-negative weights supporting point updates and
// inverse-CDF lookup in O(log n).
class WeightTree {
 public:
  explicit WeightTree(std::vector<double> weights) : weights_(std::move(weights)) { rebuild(); }

  double total() const { return total_; }
  double weight(std::size_t k) const { return weights_[k]; }

  void set(std::size_t k, double value) {
    const double delta = value - weights_[k];
    weights_[k] = value;
    total_ += delta;
    for (std::size_t i = k + 1; i <= weights_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  // Smallest k with prefix(k + 1) > target.
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = top_bit_; step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next <= weights_.size() && tree_[next] <= target) {
        pos = next;
        target -= tree_[next];
      }
    }
    return std::min(pos, weights_.size() - 1);
  }

  void rebuild() {
    const std::size_t n = weights_.size();
    tree_.assign(n + 1, 0.0);
    total_ = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      tree_[i] += weights_[i - 1];
      total_ += weights_[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n) tree_[parent] += tree_[i];
    }
    top_bit_ = 1;
    while (top_bit_ * 2 <= n) top_bit_ *= 2;
  }

 private:
  std::vector<double> weights_;
  std::vector<double> tree_;
  double total_ = 0.0;
  std::size_t top_bit_ = 1;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::vector<std::int64_t> sample_counts(const ModelSpec& model, std::int64_t m, Rng& rng) {
  const std::size_t cells = model.xi.size();
  if (m < 0) throw DomainError("sample_counts: negative edge count");
  if (static_cast<double>(m) > model.total_capacity() * (1.0 + 1e-12)) {
    throw StatisticalError("sample_counts: m exceeds the total capacity of the model");
  }
  std::vector<std::int64_t> drawn(cells, 0);
  if (m == 0) return drawn;
  std::vector<double> weights(cells);
  for (std::size_t k = 0; k < cells; ++k) weights[k] = model.xi[k] > 0.0 ? model.omega[k] * model.xi[k] : 0.0;
  WeightTree tree(std::move(weights));
  for (std::int64_t step = 0; step < m; ++step) {
    std::optional<std::size_t> pick;
    for (int attempt = 0; attempt < 2 && !pick; ++attempt) {
      if (!(tree.total() > 0.0)) break;
      const std::size_t k = tree.find(rng.uniform() * tree.total());
      if (tree.weight(k) > 0.0) {
        pick = k;
      } else {
        tree.rebuild();  // shed accumulated rounding in partial sums
      }
    }
    if (!pick) throw StatisticalError("sample_counts: capacity exhausted after " + std::to_string(step) + " draws");
    const std::size_t k = *pick;
    ++drawn[k];
    const double remaining = model.xi[k] - static_cast<double>(drawn[k]);
    tree.set(k, remaining > 0.0 ? model.omega[k] * remaining : 0.0);
  }
  return drawn;
}

MultiGraph sample_graph(const ModelSpec& model, std::int64_t m, std::uint64_t seed,
                        const std::vector<std::string>& labels) {
  Rng rng(seed);
  return MultiGraph(model.layout, sample_counts(model, m, rng), labels);
}

std::vector<MultiGraph> sample_batch(const ModelSpec& model, std::int64_t m, const SampleBatchConfig& cfg,
                                     const std::vector<std::string>& labels) {
  if (cfg.count < 1) throw DomainError("sample_batch: count must be >= 1");
  std::vector<std::optional<MultiGraph>> slots(cfg.count);
  parallel_for(cfg.count, resolve_workers(cfg.worker_hint), [&](std::size_t i) {
    try {
      slots[i].emplace(sample_graph(model, m, derive_seed(cfg.master_seed, i), labels));
    } catch (const Error& e) {
      throw StatisticalError("replicate " + std::to_string(i) + ": " + e.what());
    }
  });
  std::vector<MultiGraph> out;
  out.reserve(cfg.count);
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

GeometricGraph generate_geometric_cm(std::size_t n, std::int64_t target_m, std::uint64_t seed) {
  if (n < 2 || target_m < 1) throw DomainError("generate_geometric_cm: requires n >= 2 and target_m >= 1");
  const double mean_degree = 2.0 * static_cast<double>(target_m) / static_cast<double>(n);
  // Geometric on {0, 1, ...} with the requested mean.
  const double log_fail = std::log(mean_degree / (1.0 + mean_degree));
  const DyadLayout layout(n, false, false);
  Rng rng(seed);
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::int64_t> deg(n);
    std::int64_t sum = 0;
    for (auto& k : deg) {
      const double u = 1.0 - rng.uniform();  // (0, 1]
      k = static_cast<std::int64_t>(std::floor(std::log(u) / log_fail));
      sum += k;
    }
    const std::int64_t m = (sum + 1) / 2;
    std::vector<double> xi(layout.size());
    for (std::size_t c = 0; c < layout.size(); ++c) {
      xi[c] = static_cast<double>(deg[layout[c].source]) * static_cast<double>(deg[layout[c].target]);
    }
    double capacity = 0.0;
    for (double x : xi) capacity += x;
    if (m == 0 || capacity < static_cast<double>(m)) continue;
    ModelSpec model = make_custom(layout, std::move(xi), {}, configuration_dof(layout));
    model.kind = ModelKind::configuration;
    auto counts = sample_counts(model, m, rng);
    MultiGraph graph(layout, std::move(counts));
    return {std::move(deg), std::move(model), std::move(graph)};
  }
  throw StatisticalError("generate_geometric_cm: no usable degree sequence after retries");
}

MultiGraph generate_geometric_cm_graph(std::size_t n, std::int64_t target_m, std::uint64_t seed) {
  return generate_geometric_cm(n, target_m, seed).graph;
}

}  // namespace ghyp
