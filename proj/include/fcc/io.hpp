#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcc/clustering.hpp"
#include "fcc/fairness.hpp"
#include "fcc/stream.hpp"

namespace fcc {

/// Contents of an FCC1 clustering file.
struct ClusteringFile {
  ColorTable colors;
  FairnessConstraint constraint;
  std::vector<Clustering> clusterings;
};

void write_clustering_file(std::ostream& out, const ClusteringFile& file);
ClusteringFile read_clustering_file(std::istream& in);
ClusteringFile read_clustering_file(const std::string& path);

/// Writes a PCS1 stream. Contiguous mode emits each clustering's pairs in
/// (u,v) order; general mode emits all triples in a seeded random order.
void write_stream_file(std::ostream& out, const ClusteringFile& file, StreamMode mode,
                       std::uint64_t seed = 0);

/// Incremental PCS1 reader: header and colors up front, then one triple per
/// next() call.
class PcsReader {
 public:
  explicit PcsReader(std::istream& in);

  const StreamHeader& header() const noexcept { return header_; }
  bool next(StreamTriple& t);
  std::size_t line() const noexcept { return line_; }

 private:
  std::istream& in_;
  StreamHeader header_;
  std::size_t line_ = 0;
};

enum class FileKind { Clusterings, Stream };
/// Detects the format from the magic word on the first line.
FileKind detect_file_kind(const std::string& path);

struct GenParams {
  std::size_t n = 8;
  std::size_t m = 10;
  FairnessConstraint constraint{std::vector<std::uint32_t>{1, 1}};
  std::size_t centers = 1;
  double noise = 0.1;
  std::uint64_t seed = 0;
};

/// Colors cycle through minimal fair atoms; inputs are planted fair centers
/// (input i uses center i mod kc) with ceil(noise*n) points moved to random
/// clusters. n must be a multiple of the atom size.
ClusteringFile generate(const GenParams& params);

/// Random fair clustering built from randomly grouped fair atoms.
Clustering random_fair_clustering(const ColorTable& colors, const FairnessConstraint& p, Rng& rng);
/// Moves `moves` distinct random points to random (possibly new) clusters.
Clustering perturb(const Clustering& c, std::size_t moves, Rng& rng);
/// Color table where point v gets the color of its offset inside its atom.
ColorTable atom_colors(std::size_t n, const FairnessConstraint& p);

}  // namespace fcc
