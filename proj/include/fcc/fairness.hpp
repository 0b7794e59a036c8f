#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcc/clustering.hpp"

namespace fcc {

using Color = std::uint32_t;

/// Per-point color ids 0..C-1 with per-color totals.
class ColorTable {
 public:
  ColorTable() = default;
  ColorTable(std::vector<Color> colors, std::size_t num_colors);

  std::size_t size() const noexcept { return colors_.size(); }
  std::size_t num_colors() const noexcept { return counts_.size(); }
  Color color(PointId v) const { return colors_[v]; }
  std::span<const Color> colors() const noexcept { return colors_; }
  std::span<const std::size_t> counts() const noexcept { return counts_; }

 private:
  std::vector<Color> colors_;
  std::vector<std::size_t> counts_;
};

/// Exact-ratio fairness rule: a cluster is fair iff its per-color counts are
/// a*r_c for one integer a >= 1. Weights are stored in lowest terms.
class FairnessConstraint {
 public:
  FairnessConstraint() = default;
  explicit FairnessConstraint(std::vector<std::uint32_t> ratio);

  /// Parses "r0:r1:...".
  static FairnessConstraint parse(std::string_view text);

  std::size_t num_colors() const noexcept { return ratio_.size(); }
  std::span<const std::uint32_t> ratio() const noexcept { return ratio_; }
  std::uint32_t atom_size() const noexcept;
  std::string to_string() const;

  bool fair_counts(std::span<const std::size_t> counts) const;
  /// Throws Infeasible when the global color counts violate the ratio, and
  /// Dimension when the color table has a different color count.
  void check_feasible(const ColorTable& colors) const;

  friend bool operator==(const FairnessConstraint&, const FairnessConstraint&) = default;

 private:
  std::vector<std::uint32_t> ratio_;
};

bool is_fair(const Clustering& c, const ColorTable& colors, const FairnessConstraint& p);

enum class FairMode { Exact, TwoColorRepair };

std::string_view to_string(FairMode mode);
FairMode parse_fair_mode(std::string_view text);

struct ClosestFairBackend {
  FairMode mode = FairMode::Exact;
  std::size_t exhaustive_guard = 12;

  /// Declared approximation factor; the repair heuristic has no proven one.
  std::optional<double> gamma_claim() const {
    if (mode == FairMode::Exact) return 1.0;
    return std::nullopt;
  }
};

struct FairFit {
  Clustering clustering;
  std::uint64_t distance = 0;
};

/// A fair clustering near `c` produced by the chosen backend. Exact mode is
/// optimal and limited to n <= exhaustive_guard.
FairFit closest_fair(const Clustering& c, const ColorTable& colors,
                     const FairnessConstraint& p, const ClosestFairBackend& backend);

/// Exhaustive branch-and-bound over set partitions.
FairFit exact_closest_fair(const Clustering& c, const ColorTable& colors,
                           const FairnessConstraint& p, std::size_t guard = 12);

/// Greedy two-color repair: keep each cluster's largest fair core, pack the
/// evicted points into minimal fair atoms, then merge pieces while that
/// lowers the distance to `c`. Always fair.
Clustering two_color_repair(const Clustering& c, const ColorTable& colors,
                            const FairnessConstraint& p);

}  // namespace fcc
