#include "fcc/fairness.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

namespace fcc {

ColorTable::ColorTable(std::vector<Color> colors, std::size_t num_colors)
    : colors_(std::move(colors)), counts_(num_colors, 0) {
  if (num_colors == 0) throw Error(ErrorKind::Argument, "color table needs at least one color");
  for (Color c : colors_) {
    if (c >= num_colors) {
      throw Error(ErrorKind::MalformedInput,
                  "color id " + std::to_string(c) + " >= " + std::to_string(num_colors));
    }
    ++counts_[c];
  }
}

FairnessConstraint::FairnessConstraint(std::vector<std::uint32_t> ratio) : ratio_(std::move(ratio)) {
  if (ratio_.empty()) throw Error(ErrorKind::Argument, "fairness ratio is empty");
  std::uint32_t g = 0;
  for (auto r : ratio_) {
    if (r == 0) throw Error(ErrorKind::Argument, "fairness ratio weights must be positive");
    g = std::gcd(g, r);
  }
  for (auto& r : ratio_) r /= g;
}

FairnessConstraint FairnessConstraint::parse(std::string_view text) {
  std::vector<std::uint32_t> ratio;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(':', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(pos, end - pos);
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
      throw Error(ErrorKind::MalformedInput, "bad ratio '" + std::string(text) + "'");
    }
    ratio.push_back(value);
    pos = end + 1;
  }
  return FairnessConstraint(std::move(ratio));
}

std::uint32_t FairnessConstraint::atom_size() const noexcept {
  return std::accumulate(ratio_.begin(), ratio_.end(), 0U);
}

std::string FairnessConstraint::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < ratio_.size(); ++c) {
    if (c) out += ':';
    out += std::to_string(ratio_[c]);
  }
  return out;
}

bool FairnessConstraint::fair_counts(std::span<const std::size_t> counts) const {
  if (counts.size() != ratio_.size()) return false;
  if (counts[0] == 0 || counts[0] % ratio_[0] != 0) return false;
  const std::size_t a = counts[0] / ratio_[0];
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] != a * ratio_[c]) return false;
  }
  return true;
}

void FairnessConstraint::check_feasible(const ColorTable& colors) const {
  if (colors.num_colors() != ratio_.size()) {
    throw Error(ErrorKind::Dimension, "color table has " + std::to_string(colors.num_colors()) +
                                          " colors but ratio has " + std::to_string(ratio_.size()));
  }
  if (!fair_counts(colors.counts())) {
    throw Error(ErrorKind::Infeasible,
                "global color counts do not satisfy ratio " + to_string());
  }
}

bool is_fair(const Clustering& c, const ColorTable& colors, const FairnessConstraint& p) {
  if (c.size() != colors.size()) throw Error(ErrorKind::Dimension, "color table size mismatch");
  if (colors.num_colors() != p.num_colors()) {
    throw Error(ErrorKind::Dimension, "color count does not match ratio");
  }
  const std::size_t nc = p.num_colors();
  std::vector<std::size_t> counts(c.num_clusters() * nc, 0);
  for (PointId v = 0; v < c.size(); ++v) ++counts[c.label(v) * nc + colors.color(v)];
  for (std::size_t j = 0; j < c.num_clusters(); ++j) {
    if (!p.fair_counts(std::span<const std::size_t>(counts).subspan(j * nc, nc))) return false;
  }
  return true;
}

std::string_view to_string(FairMode mode) {
  return mode == FairMode::Exact ? "exact" : "repair";
}

FairMode parse_fair_mode(std::string_view text) {
  if (text == "exact") return FairMode::Exact;
  if (text == "repair") return FairMode::TwoColorRepair;
  throw Error(ErrorKind::Argument, "unknown backend '" + std::string(text) + "'");
}

namespace {

void check_inputs(const Clustering& c, const ColorTable& colors, const FairnessConstraint& p) {
  if (c.size() != colors.size()) throw Error(ErrorKind::Dimension, "color table size mismatch");
  p.check_feasible(colors);
}

// Depth-first search over restricted-growth strings. Points are placed in id
// order; the partial distance to the reference and the per-color deficit of
// the open clusters bound each branch.
class ExactFairSearch {
 public:
  ExactFairSearch(const Clustering& ref, const ColorTable& colors, const FairnessConstraint& p)
      : ref_(ref), colors_(colors), ratio_(p.ratio()), n_(ref.size()), nc_(p.num_colors()),
        ref_labels_(ref.num_clusters()), assign_(n_, 0), remaining_(colors.counts().begin(),
                                                                   colors.counts().end()),
        need_(nc_, 0),
        clusters_(n_, Open{0, std::vector<std::size_t>(nc_, 0),
                           std::vector<std::size_t>(ref.num_clusters(), 0),
                           std::vector<std::size_t>(nc_, 0)}) {}

  void run(std::uint64_t upper_bound, std::vector<Label> incumbent) {
    best_ = upper_bound;
    best_assign_ = std::move(incumbent);
    dfs(0, 0);
  }

  std::uint64_t best() const { return best_; }
  const std::vector<Label>& best_assign() const { return best_assign_; }

 private:
  struct Open {
    std::size_t size = 0;
    std::vector<std::size_t> color_count;
    std::vector<std::size_t> ref_count;
    std::vector<std::size_t> deficit;
  };

  void refresh_deficit(Open& cl) {
    std::size_t a = 1;
    for (std::size_t c = 0; c < nc_; ++c) {
      a = std::max(a, (cl.color_count[c] + ratio_[c] - 1) / ratio_[c]);
    }
    for (std::size_t c = 0; c < nc_; ++c) {
      need_[c] -= cl.deficit[c];
      cl.deficit[c] = a * ratio_[c] - cl.color_count[c];
      need_[c] += cl.deficit[c];
    }
  }

  bool feasible() const {
    for (std::size_t c = 0; c < nc_; ++c) {
      if (need_[c] > remaining_[c]) return false;
    }
    return true;
  }

  void dfs(PointId v, std::uint64_t partial) {
    if (v == n_) {
      if (partial < best_) {
        best_ = partial;
        best_assign_ = assign_;
      }
      return;
    }
    const Label o = ref_.label(v);
    const Color col = colors_.color(v);
    const std::size_t same_label_before = ref_labels_seen(o);
    const std::size_t open = open_;
    for (std::size_t j = 0; j <= open; ++j) {
      Open& cl = clusters_[j];
      const std::size_t both = cl.ref_count[o];
      const std::uint64_t added = (cl.size - both) + (same_label_before - both);
      if (partial + added < best_) {
        ++cl.size;
        ++cl.color_count[col];
        ++cl.ref_count[o];
        --remaining_[col];
        ++ref_labels_[o];
        auto saved = cl.deficit;
        refresh_deficit(cl);
        if (feasible()) {
          assign_[v] = static_cast<Label>(j);
          if (j == open) ++open_;
          dfs(v + 1, partial + added);
          if (j == open) --open_;
        }
        Open& back = clusters_[j];
        for (std::size_t c = 0; c < nc_; ++c) {
          need_[c] -= back.deficit[c];
          back.deficit[c] = saved[c];
          need_[c] += back.deficit[c];
        }
        --ref_labels_[o];
        ++remaining_[col];
        --back.ref_count[o];
        --back.color_count[col];
        --back.size;
      }
    }
  }

  std::size_t ref_labels_seen(Label l) const { return ref_labels_[l]; }

  const Clustering& ref_;
  const ColorTable& colors_;
  std::span<const std::uint32_t> ratio_;
  std::size_t n_;
  std::size_t nc_;
  std::vector<std::size_t> ref_labels_;
  std::vector<Label> assign_;
  std::vector<std::size_t> remaining_;
  std::vector<std::size_t> need_;
  std::vector<Open> clusters_;
  std::size_t open_ = 0;
  std::uint64_t best_ = 0;
  std::vector<Label> best_assign_;
};

Clustering from_label_vector(const std::vector<Label>& labels) {
  std::vector<std::int64_t> raw(labels.begin(), labels.end());
  return Clustering::from_labels(raw);
}

}  // namespace

FairFit exact_closest_fair(const Clustering& c, const ColorTable& colors,
                           const FairnessConstraint& p, std::size_t guard) {
  check_inputs(c, colors, p);
  if (c.size() > guard) {
    throw Error(ErrorKind::Capability, "exact closest-fair search is limited to n <= " +
                                           std::to_string(guard) + " (got " +
                                           std::to_string(c.size()) + ")");
  }
  // The single cluster is fair whenever the global ratio is; with two colors
  // the repair heuristic usually gives a tighter starting bound.
  Clustering incumbent = Clustering::single_cluster(c.size());
  std::uint64_t bound = dist(c, incumbent);
  if (p.num_colors() <= 2) {
    Clustering repaired = two_color_repair(c, colors, p);
    const std::uint64_t d = dist(c, repaired);
    if (d < bound) {
      bound = d;
      incumbent = std::move(repaired);
    }
  }
  ExactFairSearch search(c, colors, p);
  search.run(bound, std::vector<Label>(incumbent.labels().begin(), incumbent.labels().end()));
  return FairFit{from_label_vector(search.best_assign()), search.best()};
}

Clustering two_color_repair(const Clustering& c, const ColorTable& colors,
                            const FairnessConstraint& p) {
  check_inputs(c, colors, p);
  if (p.num_colors() > 2) {
    throw Error(ErrorKind::Capability, "two-color repair supports at most 2 colors");
  }
  const std::size_t nc = p.num_colors();
  const auto ratio = p.ratio();
  auto groups = c.groups();

  // Largest fair core per cluster; everything else is evicted, lowest ids first.
  struct Piece {
    std::vector<PointId> points;
  };
  std::vector<Piece> pieces;
  struct Eviction {
    std::size_t origin;
    std::vector<PointId> points;
  };
  std::vector<Eviction> evictions;
  for (std::size_t j = 0; j < groups.size(); ++j) {
    std::vector<std::vector<PointId>> by_color(nc);
    for (PointId v : groups[j]) by_color[colors.color(v)].push_back(v);
    std::size_t a = std::numeric_limits<std::size_t>::max();
    for (std::size_t col = 0; col < nc; ++col) a = std::min(a, by_color[col].size() / ratio[col]);
    Piece kept;
    Eviction ev{j, {}};
    for (std::size_t col = 0; col < nc; ++col) {
      const std::size_t surplus = by_color[col].size() - a * ratio[col];
      ev.points.insert(ev.points.end(), by_color[col].begin(), by_color[col].begin() + surplus);
      kept.points.insert(kept.points.end(), by_color[col].begin() + surplus, by_color[col].end());
    }
    if (!kept.points.empty()) pieces.push_back(std::move(kept));
    if (!ev.points.empty()) {
      std::sort(ev.points.begin(), ev.points.end());
      evictions.push_back(std::move(ev));
    }
  }
  std::stable_sort(evictions.begin(), evictions.end(), [](const Eviction& x, const Eviction& y) {
    if (x.points.size() != y.points.size()) return x.points.size() < y.points.size();
    return x.points.front() < y.points.front();
  });

  // Pack evicted points into atoms of exactly ratio[col] points per color. An
  // atom is seeded from the first pending point and filled from the seed's
  // origin first, then from the pool in eviction order.
  std::vector<std::pair<PointId, std::size_t>> pool;  // (point, origin)
  for (const auto& ev : evictions) {
    for (PointId v : ev.points) pool.emplace_back(v, ev.origin);
  }
  std::vector<bool> used(pool.size(), false);
  std::size_t cursor = 0;
  while (true) {
    while (cursor < pool.size() && used[cursor]) ++cursor;
    if (cursor == pool.size()) break;
    const std::size_t origin = pool[cursor].second;
    std::vector<std::size_t> missing(ratio.begin(), ratio.end());
    Piece atom;
    auto take = [&](std::size_t idx) {
      const Color col = colors.color(pool[idx].first);
      if (used[idx] || missing[col] == 0) return;
      used[idx] = true;
      --missing[col];
      atom.points.push_back(pool[idx].first);
    };
    for (std::size_t idx = cursor; idx < pool.size(); ++idx) {
      if (pool[idx].second == origin) take(idx);
    }
    for (std::size_t idx = cursor; idx < pool.size(); ++idx) take(idx);
    for (auto left : missing) {
      if (left != 0) throw Error(ErrorKind::Infeasible, "evicted points do not form fair atoms");
    }
    pieces.push_back(std::move(atom));
  }

  // Merge pieces while some merge strictly reduces the distance to c. The
  // gain of merging A and B is (#pairs together in c) - (#pairs apart in c).
  const std::size_t np = pieces.size();
  std::vector<std::vector<std::size_t>> label_counts(np, std::vector<std::size_t>(c.num_clusters(), 0));
  std::vector<std::size_t> sizes(np, 0);
  for (std::size_t i = 0; i < np; ++i) {
    for (PointId v : pieces[i].points) ++label_counts[i][c.label(v)];
    sizes[i] = pieces[i].points.size();
  }
  auto gain = [&](std::size_t x, std::size_t y) {
    std::int64_t together = 0;
    for (std::size_t l = 0; l < c.num_clusters(); ++l) {
      together += static_cast<std::int64_t>(label_counts[x][l] * label_counts[y][l]);
    }
    return 2 * together - static_cast<std::int64_t>(sizes[x] * sizes[y]);
  };
  std::vector<bool> alive(np, true);
  while (true) {
    std::int64_t best_gain = 0;
    std::size_t bx = 0, by = 0;
    for (std::size_t x = 0; x < np; ++x) {
      if (!alive[x]) continue;
      for (std::size_t y = x + 1; y < np; ++y) {
        if (!alive[y]) continue;
        const std::int64_t g = gain(x, y);
        if (g > best_gain) {
          best_gain = g;
          bx = x;
          by = y;
        }
      }
    }
    if (best_gain <= 0) break;
    pieces[bx].points.insert(pieces[bx].points.end(), pieces[by].points.begin(),
                             pieces[by].points.end());
    for (std::size_t l = 0; l < c.num_clusters(); ++l) label_counts[bx][l] += label_counts[by][l];
    sizes[bx] += sizes[by];
    alive[by] = false;
  }

  std::vector<std::int64_t> raw(c.size(), -1);
  std::int64_t next = 0;
  for (std::size_t i = 0; i < np; ++i) {
    if (!alive[i]) continue;
    for (PointId v : pieces[i].points) raw[v] = next;
    ++next;
  }
  return Clustering::from_labels(raw);
}

FairFit closest_fair(const Clustering& c, const ColorTable& colors, const FairnessConstraint& p,
                     const ClosestFairBackend& backend) {
  if (backend.mode == FairMode::Exact) {
    return exact_closest_fair(c, colors, p, backend.exhaustive_guard);
  }
  Clustering repaired = two_color_repair(c, colors, p);
  const std::uint64_t d = dist(c, repaired);
  return FairFit{std::move(repaired), d};
}

}  // namespace fcc
