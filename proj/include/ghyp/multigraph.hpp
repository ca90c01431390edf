#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ghyp {

// An ordered pair (directed) or unordered pair with source <= target (undirected).
struct Dyad {
  std::size_t source;
  std::size_t target;
  bool operator==(const Dyad&) const = default;
};

// Enumerates the dyads admissible for a given vertex count and directedness /
// self-loop convention. Every per-dyad vector in the library (edge counts, Ξ,
// Ω) is indexed in this canonical row-major order.
class DyadLayout {
 public:
  DyadLayout() = default;
  DyadLayout(std::size_t n, bool directed, bool selfloops);

  std::size_t vertex_count() const noexcept { return n_; }
  bool directed() const noexcept { return directed_; }
  bool selfloops() const noexcept { return selfloops_; }
  std::size_t size() const noexcept { return dyads_.size(); }
  const std::vector<Dyad>& dyads() const noexcept { return dyads_; }
  const Dyad& operator[](std::size_t k) const { return dyads_[k]; }

  // Index of the dyad joining i and j; nullopt for an excluded self-loop.
  // Undirected pairs are canonicalized, so index(i, j) == index(j, i).
  std::optional<std::size_t> index(std::size_t i, std::size_t j) const;

  bool operator==(const DyadLayout& other) const {
    return n_ == other.n_ && directed_ == other.directed_ && selfloops_ == other.selfloops_;
  }

 private:
  std::size_t n_ = 0;
  bool directed_ = true;
  bool selfloops_ = true;
  std::vector<Dyad> dyads_;
};

// Number of dyads: n², n(n-1), n(n+1)/2 or n(n-1)/2.
std::size_t cell_count(std::size_t n, bool directed, bool selfloops);

struct DegreeSequences {
  std::vector<std::int64_t> out;
  std::vector<std::int64_t> in;  // equal to `out` for undirected graphs
};

// Immutable multi-edge network: integer edge counts per dyad plus labels.
class MultiGraph {
 public:
  MultiGraph(DyadLayout layout, std::vector<std::int64_t> counts, std::vector<std::string> labels = {});

  std::size_t vertex_count() const noexcept { return layout_.vertex_count(); }
  bool directed() const noexcept { return layout_.directed(); }
  bool selfloops() const noexcept { return layout_.selfloops(); }
  const DyadLayout& layout() const noexcept { return layout_; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::int64_t edge_count() const noexcept { return m_; }
  // A_ij; symmetric lookup when undirected, 0 for excluded self-loops.
  std::int64_t count(std::size_t i, std::size_t j) const;

  // Dense n×n matrix (symmetric when undirected), row-major.
  std::vector<std::int64_t> dense_matrix() const;

 private:
  DyadLayout layout_;
  std::vector<std::int64_t> counts_;
  std::vector<std::string> labels_;
  std::int64_t m_ = 0;
};

// Directed: out/in degrees. Undirected: a single sequence (self-loops count 2),
// returned in both fields.
DegreeSequences degrees(const MultiGraph& g);
std::size_t cell_count(const MultiGraph& g);

struct LoadOptions {
  bool directed = false;
  // nullopt: self-loops allowed iff the input contains one.
  std::optional<bool> selfloops;
};

// Parses `source target [count [timestamp]]` lines; '#' comments and blank
// lines are skipped, repeated pairs accumulate.
MultiGraph load_edgelist(std::istream& in, const LoadOptions& options);
MultiGraph load_edgelist_file(const std::string& path, const LoadOptions& options);

// One `source<TAB>target<TAB>count` line per nonzero dyad. Isolated vertices
// are declared in a leading `# vertices:` comment so a reload keeps them.
void write_edgelist(std::ostream& out, const MultiGraph& g);

struct Partition {
  std::vector<std::size_t> group_of;  // dense group index per vertex
  std::vector<std::string> group_labels;
  std::size_t group_count() const noexcept { return group_labels.size(); }
};

Partition make_partition(std::vector<std::size_t> group_of);

// Lines `vertex group`; every vertex of `g` must be assigned exactly once.
Partition load_partition(std::istream& in, const MultiGraph& g);
Partition load_partition_file(const std::string& path, const MultiGraph& g);

}  // namespace ghyp
