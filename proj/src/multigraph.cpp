#include "ghyp/multigraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ghyp/error.hpp"

namespace ghyp {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream stream(line);
  std::vector<std::string> fields;
  std::string field;
  while (stream >> field) fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Header directives written by write_edgelist: "# vertices: a b c", "# selfloops: yes".
bool parse_directive(const std::string& comment, const std::string& key, std::string& value) {
  const std::string body = trim(comment.substr(1));
  if (body.rfind(key + ":", 0) != 0) return false;
  value = trim(body.substr(key.size() + 1));
  return true;
}

class LabelIndex {
 public:
  std::size_t intern(const std::string& label) {
    auto [it, inserted] = index_.try_emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::vector<std::string>& labels() { return labels_; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> labels_;
};

}  // namespace

DyadLayout::DyadLayout(std::size_t n, bool directed, bool selfloops)
    : n_(n), directed_(directed), selfloops_(selfloops) {
  dyads_.reserve(cell_count(n, directed, selfloops));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = directed ? 0 : i; j < n; ++j) {
      if (i == j && !selfloops) continue;
      dyads_.push_back({i, j});
    }
  }
}

std::optional<std::size_t> DyadLayout::index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) throw DomainError("dyad index out of range");
  if (i == j && !selfloops_) return std::nullopt;
  if (directed_) {
    std::size_t k = i * n_ + j;
    if (!selfloops_) k -= i + (j > i ? 1 : 0);
    return k;
  }
  if (i > j) std::swap(i, j);
  // Rows 0..i-1 hold (n - r) or (n - r - 1) entries each.
  const std::size_t before = selfloops_ ? i * n_ - i * (i - 1) / 2 : i * (n_ - 1) - i * (i - 1) / 2;
  return before + (selfloops_ ? j - i : j - i - 1);
}

std::size_t cell_count(std::size_t n, bool directed, bool selfloops) {
  if (directed) return selfloops ? n * n : n * (n - (n > 0 ? 1 : 0));
  return selfloops ? n * (n + 1) / 2 : (n * (n > 0 ? n - 1 : 0)) / 2;
}

MultiGraph::MultiGraph(DyadLayout layout, std::vector<std::int64_t> counts, std::vector<std::string> labels)
    : layout_(std::move(layout)), counts_(std::move(counts)), labels_(std::move(labels)) {
  if (counts_.size() != layout_.size()) throw DomainError("edge-count vector does not match dyad layout");
  if (labels_.empty()) {
    labels_.reserve(layout_.vertex_count());
    for (std::size_t i = 0; i < layout_.vertex_count(); ++i) labels_.push_back(std::to_string(i));
  }
  if (labels_.size() != layout_.vertex_count()) throw DomainError("label count does not match vertex count");
  for (auto c : counts_) {
    if (c < 0) throw DomainError("negative edge count");
    m_ += c;
  }
}

std::int64_t MultiGraph::count(std::size_t i, std::size_t j) const {
  const auto k = layout_.index(i, j);
  return k ? counts_[*k] : 0;
}

std::vector<std::int64_t> MultiGraph::dense_matrix() const {
  const std::size_t n = vertex_count();
  std::vector<std::int64_t> dense(n * n, 0);
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    const auto& d = layout_[k];
    dense[d.source * n + d.target] = counts_[k];
    if (!directed()) dense[d.target * n + d.source] = counts_[k];
  }
  return dense;
}

DegreeSequences degrees(const MultiGraph& g) {
  const std::size_t n = g.vertex_count();
  DegreeSequences seq{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0)};
  const auto& layout = g.layout();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto c = g.counts()[k];
    if (c == 0) continue;
    const auto& d = layout[k];
    if (g.directed()) {
      seq.out[d.source] += c;
      seq.in[d.target] += c;
    } else {
      seq.out[d.source] += c;
      seq.out[d.target] += c;
    }
  }
  if (!g.directed()) seq.in = seq.out;
  return seq;
}

std::size_t cell_count(const MultiGraph& g) {
  return cell_count(g.vertex_count(), g.directed(), g.selfloops());
}

MultiGraph load_edgelist(std::istream& in, const LoadOptions& options) {
  struct Entry {
    std::size_t source;
    std::size_t target;
    std::int64_t count;
  };
  LabelIndex labels;
  std::vector<Entry> entries;
  std::optional<bool> declared_selfloops;
  bool saw_selfloop = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      std::string value;
      if (parse_directive(text, "vertices", value)) {
        for (const auto& label : split_fields(value)) labels.intern(label);
      } else if (parse_directive(text, "selfloops", value)) {
        declared_selfloops = (value == "yes" || value == "true" || value == "1");
      }
      continue;
    }
    const auto fields = split_fields(text);
    if (fields.size() < 2 || fields.size() > 4) {
      throw ParseError("expected 'source target [count [timestamp]]', got '" + text + "'", line_no);
    }
    std::int64_t count = 1;
    if (fields.size() >= 3) {
      const auto& f = fields[2];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), count);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError("invalid edge count '" + f + "'", line_no);
      }
      if (count < 0) throw ParseError("negative edge count " + f, line_no);
    }
    const std::size_t s = labels.intern(fields[0]);
    const std::size_t t = labels.intern(fields[1]);
    saw_selfloop = saw_selfloop || s == t;
    entries.push_back({s, t, count});
  }
  const bool selfloops = options.selfloops.value_or(declared_selfloops.value_or(saw_selfloop));
  if (saw_selfloop && !selfloops) {
    throw ParseError("input contains self-loops but self-loops are disabled", 0);
  }
  DyadLayout layout(labels.labels().size(), options.directed, selfloops);
  std::vector<std::int64_t> counts(layout.size(), 0);
  for (const auto& e : entries) counts[*layout.index(e.source, e.target)] += e.count;
  return MultiGraph(std::move(layout), std::move(counts), std::move(labels.labels()));
}

MultiGraph load_edgelist_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  try {
    return load_edgelist(in, options);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_edgelist(std::ostream& out, const MultiGraph& g) {
  out << "# vertices:";
  for (const auto& label : g.labels()) out << ' ' << label;
  out << "\n# selfloops: " << (g.selfloops() ? "yes" : "no") << '\n';
  const auto& layout = g.layout();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    const auto c = g.counts()[k];
    if (c == 0) continue;
    out << g.labels()[layout[k].source] << '\t' << g.labels()[layout[k].target] << '\t' << c << '\n';
  }
}

Partition make_partition(std::vector<std::size_t> group_of) {
  Partition p;
  std::size_t groups = 0;
  for (auto gidx : group_of) groups = std::max(groups, gidx + 1);
  p.group_of = std::move(group_of);
  for (std::size_t r = 0; r < groups; ++r) p.group_labels.push_back(std::to_string(r));
  return p;
}

Partition load_partition(std::istream& in, const MultiGraph& g) {
  std::unordered_map<std::string, std::size_t> vertex_index;
  for (std::size_t i = 0; i < g.labels().size(); ++i) vertex_index.emplace(g.labels()[i], i);
  const std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> group_of(g.vertex_count(), none);
  LabelIndex groups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = split_fields(text);
    if (fields.size() != 2) throw ParseError("expected 'vertex group'", line_no);
    auto it = vertex_index.find(fields[0]);
    if (it == vertex_index.end()) throw ParseError("unknown vertex '" + fields[0] + "'", line_no);
    if (group_of[it->second] != none) throw ParseError("vertex '" + fields[0] + "' assigned twice", line_no);
    group_of[it->second] = groups.intern(fields[1]);
  }
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    if (group_of[i] == none) throw ParseError("vertex '" + g.labels()[i] + "' has no group", 0);
  }
  Partition p;
  p.group_of = std::move(group_of);
  p.group_labels = std::move(groups.labels());
  return p;
}

Partition load_partition_file(const std::string& path, const MultiGraph& g) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open partition file '" + path + "'");
  return load_partition(in, g);
}

}  // namespace ghyp
