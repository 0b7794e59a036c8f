#include "fcc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fcc {

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::MalformedInput, "line " + std::to_string(line) + ": " + what);
}

std::uint64_t parse_uint(std::string_view text, std::size_t line) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    malformed(line, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_spaces(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool read_line(std::istream& in, std::string& line, std::size_t& counter) {
  if (!std::getline(in, line)) return false;
  ++counter;
  if (!line.empty() && line.back() == '\r') malformed(counter, "CR line ending");
  return true;
}

struct Header {
  std::string magic;
  std::map<std::string, std::string, std::less<>> fields;
};

Header parse_header(const std::string& line, std::size_t counter) {
  auto tokens = split_spaces(line);
  if (tokens.empty()) malformed(counter, "empty header");
  Header h;
  h.magic = std::string(tokens[0]);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    auto eq = tokens[i].find('=');
    if (eq == std::string_view::npos) malformed(counter, "header field without '='");
    auto [it, fresh] =
        h.fields.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
    if (!fresh) malformed(counter, "duplicate header field " + it->first);
  }
  return h;
}

const std::string& field(const Header& h, std::string_view key, std::size_t counter) {
  auto it = h.fields.find(key);
  if (it == h.fields.end()) malformed(counter, "header lacks " + std::string(key) + "=");
  return it->second;
}

std::pair<ColorTable, FairnessConstraint> read_colors(std::istream& in, const Header& h,
                                                      std::size_t n, std::size_t& counter) {
  const std::size_t num_colors = parse_uint(field(h, "colors", counter), counter);
  FairnessConstraint constraint = FairnessConstraint::parse(field(h, "ratio", counter));
  if (constraint.num_colors() != num_colors) {
    malformed(counter, "ratio has " + std::to_string(constraint.num_colors()) +
                           " entries but colors=" + std::to_string(num_colors));
  }
  std::vector<Color> colors(n);
  std::vector<bool> seen(n, false);
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!read_line(in, line, counter)) malformed(counter, "missing color lines");
    auto tok = split_spaces(line);
    if (tok.size() != 2) malformed(counter, "expected '<point_id> <color_id>'");
    const auto v = parse_uint(tok[0], counter);
    const auto c = parse_uint(tok[1], counter);
    if (v >= n) malformed(counter, "point id out of range");
    if (seen[v]) malformed(counter, "duplicate point id in color table");
    if (c >= num_colors) malformed(counter, "color id out of range");
    seen[v] = true;
    colors[v] = static_cast<Color>(c);
  }
  return {ColorTable(std::move(colors), num_colors), std::move(constraint)};
}

void write_colors(std::ostream& out, const ColorTable& colors) {
  for (std::size_t v = 0; v < colors.size(); ++v) {
    out << v << ' ' << colors.color(static_cast<PointId>(v)) << '\n';
  }
}

std::string header_fields(std::size_t n, std::size_t m, const ColorTable& colors,
                          const FairnessConstraint& p) {
  return "n=" + std::to_string(n) + " m=" + std::to_string(m) +
         " colors=" + std::to_string(colors.num_colors()) + " ratio=" + p.to_string();
}

void check_file(const ClusteringFile& file) {
  const std::size_t n = file.colors.size();
  for (const auto& c : file.clusterings) {
    if (c.size() != n) throw Error(ErrorKind::Dimension, "clustering size does not match n");
  }
  if (file.colors.num_colors() != file.constraint.num_colors()) {
    throw Error(ErrorKind::Dimension, "color count does not match the ratio");
  }
}

}  // namespace

void write_clustering_file(std::ostream& out, const ClusteringFile& file) {
  check_file(file);
  const std::size_t n = file.colors.size();
  out << "FCC1 " << header_fields(n, file.clusterings.size(), file.colors, file.constraint) << '\n';
  write_colors(out, file.colors);
  for (std::size_t j = 0; j < file.clusterings.size(); ++j) {
    out << "# " << j << '\n';
    const auto& c = file.clusterings[j];
    for (std::size_t v = 0; v < n; ++v) out << v << ' ' << c.label(static_cast<PointId>(v)) << '\n';
  }
}

ClusteringFile read_clustering_file(std::istream& in) {
  std::size_t counter = 0;
  std::string line;
  if (!read_line(in, line, counter)) malformed(1, "empty file");
  Header h = parse_header(line, counter);
  if (h.magic != "FCC1") malformed(counter, "expected FCC1 magic");
  const std::size_t n = parse_uint(field(h, "n", counter), counter);
  const std::size_t m = parse_uint(field(h, "m", counter), counter);
  ClusteringFile file;
  std::tie(file.colors, file.constraint) = read_colors(in, h, n, counter);
  for (std::size_t j = 0; j < m; ++j) {
    if (!read_line(in, line, counter)) malformed(counter, "missing clustering block " + std::to_string(j));
    auto tok = split_spaces(line);
    if (tok.size() != 2 || tok[0] != "#" || parse_uint(tok[1], counter) != j) {
      malformed(counter, "expected '# " + std::to_string(j) + "'");
    }
    std::map<std::size_t, std::int64_t> raw;
    for (std::size_t i = 0; i < n; ++i) {
      if (!read_line(in, line, counter)) malformed(counter, "truncated clustering block");
      auto t = split_spaces(line);
      if (t.size() != 2) malformed(counter, "expected '<point_id> <cluster_label>'");
      const auto v = parse_uint(t[0], counter);
      if (!raw.emplace(v, static_cast<std::int64_t>(parse_uint(t[1], counter))).second) {
        malformed(counter, "duplicate point id in clustering");
      }
    }
    file.clusterings.push_back(canonicalize(n, raw));
  }
  while (read_line(in, line, counter)) {
    if (!line.empty()) malformed(counter, "trailing content");
  }
  return file;
}

ClusteringFile read_clustering_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open " + path);
  return read_clustering_file(in);
}

void write_stream_file(std::ostream& out, const ClusteringFile& file, StreamMode mode,
                       std::uint64_t seed) {
  check_file(file);
  const std::size_t n = file.colors.size();
  out << "PCS1 " << header_fields(n, file.clusterings.size(), file.colors, file.constraint)
      << " mode=" << to_string(mode) << '\n';
  write_colors(out, file.colors);
  std::vector<StreamTriple> all;
  for (std::size_t j = 0; j < file.clusterings.size(); ++j) {
    auto block = encode_triples(file.clusterings[j], static_cast<std::uint32_t>(j));
    all.insert(all.end(), block.begin(), block.end());
  }
  if (mode == StreamMode::General) {
    Rng rng(derive_seed(seed, "pcs-general"));
    std::shuffle(all.begin(), all.end(), rng);
  }
  for (const auto& t : all) out << t.u << ' ' << t.v << ' ' << t.j << ' ' << int(t.b) << '\n';
}

PcsReader::PcsReader(std::istream& in) : in_(in) {
  std::string line;
  if (!read_line(in_, line, line_)) malformed(1, "empty file");
  Header h = parse_header(line, line_);
  if (h.magic != "PCS1") malformed(line_, "expected PCS1 magic");
  header_.n = parse_uint(field(h, "n", line_), line_);
  header_.m = parse_uint(field(h, "m", line_), line_);
  header_.mode = parse_stream_mode(field(h, "mode", line_));
  std::tie(header_.colors, header_.constraint) = read_colors(in_, h, header_.n, line_);
}

bool PcsReader::next(StreamTriple& t) {
  std::string line;
  while (read_line(in_, line, line_)) {
    auto tok = split_spaces(line);
    if (tok.empty()) continue;
    if (tok.size() != 4) malformed(line_, "expected '<u> <v> <j> <b>'");
    t.u = static_cast<PointId>(parse_uint(tok[0], line_));
    t.v = static_cast<PointId>(parse_uint(tok[1], line_));
    t.j = static_cast<std::uint32_t>(parse_uint(tok[2], line_));
    const auto b = parse_uint(tok[3], line_);
    if (b > 1) malformed(line_, "bit must be 0 or 1");
    t.b = static_cast<std::uint8_t>(b);
    try {
      validate_triple(header_, t);
    } catch (const Error& e) {
      malformed(line_, e.what());
    }
    return true;
  }
  return false;
}

FileKind detect_file_kind(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MalformedInput, "cannot open " + path);
  std::string magic(4, '\0');
  in.read(magic.data(), 4);
  if (magic == "FCC1") return FileKind::Clusterings;
  if (magic == "PCS1") return FileKind::Stream;
  throw Error(ErrorKind::MalformedInput, path + ": unknown file format");
}

ColorTable atom_colors(std::size_t n, const FairnessConstraint& p) {
  const std::size_t atom = p.atom_size();
  if (atom == 0 || n % atom != 0) {
    throw Error(ErrorKind::Infeasible, "n=" + std::to_string(n) + " is not a multiple of the atom size " +
                                           std::to_string(atom) + " of ratio " + p.to_string());
  }
  std::vector<Color> pattern;
  for (std::size_t c = 0; c < p.num_colors(); ++c) pattern.insert(pattern.end(), p.ratio()[c], static_cast<Color>(c));
  std::vector<Color> colors(n);
  for (std::size_t v = 0; v < n; ++v) colors[v] = pattern[v % atom];
  return ColorTable(std::move(colors), p.num_colors());
}

Clustering random_fair_clustering(const ColorTable& colors, const FairnessConstraint& p, Rng& rng) {
  p.check_feasible(colors);
  std::vector<std::vector<PointId>> by_color(p.num_colors());
  for (PointId v = 0; v < colors.size(); ++v) by_color[colors.color(v)].push_back(v);
  for (auto& list : by_color) std::shuffle(list.begin(), list.end(), rng);
  const std::size_t atoms = colors.size() / p.atom_size();
  const std::size_t groups = 1 + rng.below(atoms);
  std::vector<std::int64_t> raw(colors.size());
  std::vector<std::size_t> next(p.num_colors(), 0);
  for (std::size_t a = 0; a < atoms; ++a) {
    const auto label = static_cast<std::int64_t>(rng.below(groups));
    for (std::size_t c = 0; c < p.num_colors(); ++c) {
      for (std::uint32_t r = 0; r < p.ratio()[c]; ++r) raw[by_color[c][next[c]++]] = label;
    }
  }
  return Clustering::from_labels(raw);
}

Clustering perturb(const Clustering& c, std::size_t moves, Rng& rng) {
  const std::size_t n = c.size();
  std::vector<std::int64_t> raw(c.labels().begin(), c.labels().end());
  bool clamped = false;
  auto points = sample_indices(n, moves, rng, &clamped);
  for (auto v : points) {
    const std::size_t labels = c.num_clusters() + 1;
    raw[v] = static_cast<std::int64_t>(rng.below(labels));
  }
  return Clustering::from_labels(raw);
}

ClusteringFile generate(const GenParams& params) {
  if (params.m == 0) throw Error(ErrorKind::Argument, "m must be at least 1");
  if (params.centers == 0) throw Error(ErrorKind::Argument, "need at least one planted center");
  if (!(params.noise >= 0.0 && params.noise <= 1.0)) {
    throw Error(ErrorKind::Argument, "noise must lie in [0,1]");
  }
  ClusteringFile file;
  file.constraint = params.constraint;
  file.colors = atom_colors(params.n, params.constraint);
  Rng center_rng(derive_seed(params.seed, "gen-centers"));
  std::vector<Clustering> centers;
  for (std::size_t i = 0; i < params.centers; ++i) {
    centers.push_back(random_fair_clustering(file.colors, file.constraint, center_rng));
  }
  const auto moves = static_cast<std::size_t>(std::ceil(params.noise * static_cast<double>(params.n) - 1e-9));
  for (std::size_t j = 0; j < params.m; ++j) {
    Rng rng(derive_seed(params.seed, "gen-input", j));
    file.clusterings.push_back(perturb(centers[j % centers.size()], moves, rng));
  }
  return file;
}

}  // namespace fcc
