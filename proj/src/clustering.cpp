#include "fcc/clustering.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

namespace fcc {

namespace {
constexpr Label kNoLabel = std::numeric_limits<Label>::max();
}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "malformed-input";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

Clustering Clustering::from_labels(std::span<const std::int64_t> raw) {
  Clustering c;
  c.labels_.resize(raw.size());
  const std::int64_t n = static_cast<std::int64_t>(raw.size());
  if (std::all_of(raw.begin(), raw.end(), [n](std::int64_t l) { return l >= 0 && l < n; })) {
    std::vector<Label> relabel(raw.size(), kNoLabel);
    Label next = 0;
    for (std::size_t v = 0; v < raw.size(); ++v) {
      Label& mapped = relabel[static_cast<std::size_t>(raw[v])];
      if (mapped == kNoLabel) mapped = next++;
      c.labels_[v] = mapped;
    }
    c.num_clusters_ = next;
    c.finalize();
    return c;
  }
  std::unordered_map<std::int64_t, Label> relabel;
  relabel.reserve(raw.size());
  for (std::size_t v = 0; v < raw.size(); ++v) {
    auto [it, inserted] = relabel.try_emplace(raw[v], static_cast<Label>(relabel.size()));
    c.labels_[v] = it->second;
  }
  c.num_clusters_ = relabel.size();
  c.finalize();
  return c;
}

Clustering Clustering::from_labels(std::initializer_list<std::int64_t> raw) {
  return from_labels(std::span<const std::int64_t>(raw.begin(), raw.size()));
}

Clustering Clustering::from_groups(std::size_t n,
                                   const std::vector<std::vector<PointId>>& groups) {
  std::vector<std::int64_t> raw(n, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (PointId v : groups[g]) {
      if (v >= n || raw[v] != -1) {
        throw Error(ErrorKind::MalformedInput,
                    "point " + std::to_string(v) + " out of range or repeated");
      }
      raw[v] = static_cast<std::int64_t>(g);
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (raw[v] == -1) {
      throw Error(ErrorKind::MalformedInput, "point " + std::to_string(v) + " missing");
    }
  }
  return from_labels(raw);
}

Clustering Clustering::singletons(std::size_t n) {
  Clustering c;
  c.labels_.resize(n);
  for (std::size_t v = 0; v < n; ++v) c.labels_[v] = static_cast<Label>(v);
  c.num_clusters_ = n;
  c.finalize();
  return c;
}

Clustering Clustering::single_cluster(std::size_t n) {
  Clustering c;
  c.labels_.assign(n, 0);
  c.num_clusters_ = n > 0 ? 1 : 0;
  c.finalize();
  return c;
}

void Clustering::finalize() {
  together_ = 0;
  for (auto s : cluster_sizes()) together_ += static_cast<std::uint64_t>(s) * (s - 1) / 2;
}

std::vector<std::size_t> Clustering::cluster_sizes() const {
  std::vector<std::size_t> sizes(num_clusters_, 0);
  for (Label l : labels_) ++sizes[l];
  return sizes;
}

std::vector<std::vector<PointId>> Clustering::groups() const {
  std::vector<std::vector<PointId>> out(num_clusters_);
  for (std::size_t v = 0; v < labels_.size(); ++v) {
    out[labels_[v]].push_back(static_cast<PointId>(v));
  }
  return out;
}

std::size_t Clustering::hash() const noexcept {
  // FNV-1a over the label words.
  std::uint64_t h = 1469598103934665603ULL;
  for (Label l : labels_) {
    h ^= l;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

Clustering canonicalize(std::size_t n, const std::map<std::size_t, std::int64_t>& raw) {
  std::vector<std::int64_t> labels(n);
  for (std::size_t v = 0; v < n; ++v) {
    auto it = raw.find(v);
    if (it == raw.end()) {
      throw Error(ErrorKind::MalformedInput, "missing label for point " + std::to_string(v));
    }
    labels[v] = it->second;
  }
  if (raw.size() != n) {
    throw Error(ErrorKind::MalformedInput, "label map has point ids outside 0..n-1");
  }
  return Clustering::from_labels(labels);
}

InputSet::InputSet(std::vector<Clustering> clusterings) : clusterings_(std::move(clusterings)) {
  if (clusterings_.empty()) {
    throw Error(ErrorKind::Argument, "input set needs at least one clustering");
  }
  n_ = clusterings_.front().size();
  for (const auto& c : clusterings_) {
    if (c.size() != n_) {
      throw Error(ErrorKind::Dimension, "input clusterings disagree on point count");
    }
  }
}

PairSet::PairSet(std::vector<PointPair> pairs) : pairs_(std::move(pairs)) {
  for (auto& [u, v] : pairs_) {
    if (u == v) throw Error(ErrorKind::Argument, "self-pair in pair set");
    if (u > v) std::swap(u, v);
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool PairSet::contains(PointId u, PointId v) const {
  if (u > v) std::swap(u, v);
  return std::binary_search(pairs_.begin(), pairs_.end(), PointPair{u, v});
}

PairSet PairSet::intersect(const PairSet& other) const {
  PairSet out;
  std::set_intersection(pairs_.begin(), pairs_.end(), other.pairs_.begin(), other.pairs_.end(),
                        std::back_inserter(out.pairs_));
  return out;
}

namespace {

void check_same_n(const Clustering& a, const Clustering& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Dimension, "clusterings have different point counts (" +
                                          std::to_string(a.size()) + " vs " +
                                          std::to_string(b.size()) + ")");
  }
}

inline std::uint64_t choose2(std::uint64_t x) { return x * (x - (x > 0 ? 1 : 0)) / 2; }

}  // namespace

std::uint64_t dist(const Clustering& a, const Clustering& b) {
  check_same_n(a, b);
  const std::size_t n = a.size();
  std::uint64_t together_both = 0;
  const std::size_t la = a.num_clusters();
  const std::size_t lb = b.num_clusters();
  if (la * lb <= 4 * n + 1024) {
    thread_local std::vector<std::uint32_t> table;
    table.assign(la * lb, 0);
    for (std::size_t v = 0; v < n; ++v) ++table[a.label(v) * lb + b.label(v)];
    for (auto cell : table) together_both += choose2(cell);
  } else {
    std::unordered_map<std::uint64_t, std::uint32_t> table;
    table.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
      ++table[static_cast<std::uint64_t>(a.label(v)) * lb + b.label(v)];
    }
    for (const auto& [key, cell] : table) together_both += choose2(cell);
  }
  return a.together_pairs() + b.together_pairs() - 2 * together_both;
}

PairSet u_set(const Clustering& c, const Clustering& ref) {
  check_same_n(c, ref);
  if (c.size() > kPairSetGuard) {
    throw Error(ErrorKind::Capability, "pair sets are limited to n <= " +
                                           std::to_string(kPairSetGuard));
  }
  std::vector<PointPair> pairs;
  for (PointId u = 0; u < c.size(); ++u) {
    for (PointId v = u + 1; v < c.size(); ++v) {
      if (c.together(u, v) != ref.together(u, v)) pairs.emplace_back(u, v);
    }
  }
  return PairSet(std::move(pairs));
}

std::uint64_t objective(const InputSet& inputs, std::span<const Clustering> centers) {
  if (centers.empty()) throw Error(ErrorKind::Argument, "objective needs at least one center");
  std::uint64_t total = 0;
  for (const auto& c : inputs) {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (const auto& z : centers) best = std::min(best, dist(c, z));
    total += best;
  }
  return total;
}

std::uint64_t objective(const InputSet& inputs, const Clustering& center) {
  return objective(inputs, std::span<const Clustering>(&center, 1));
}

double objective(std::span<const WeightedClustering> inputs, std::span<const Clustering> centers) {
  if (centers.empty()) throw Error(ErrorKind::Argument, "objective needs at least one center");
  double total = 0.0;
  for (const auto& wc : inputs) {
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (const auto& z : centers) best = std::min(best, dist(wc.clustering, z));
    total += wc.weight * static_cast<double>(best);
  }
  return total;
}

}  // namespace fcc
