// fcc: generate instances, run fair consensus clustering (offline or
// streaming), compute exact optima and benchmark.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcc/clustering.hpp"
#include "fcc/consensus.hpp"
#include "fcc/fairness.hpp"
#include "fcc/io.hpp"
#include "fcc/oracle.hpp"
#include "fcc/params.hpp"
#include "fcc/report.hpp"
#include "fcc/stream.hpp"
#include "fcc/stream_kmedian.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct GenArgs {
  std::size_t n = 8;
  std::size_t m = 10;
  std::string ratio = "1:1";
  std::size_t centers = 1;
  double noise = 0.1;
  std::uint64_t seed = 0;
  std::string out;
  std::string stream_out;
  std::string stream_mode = "contiguous";
};

struct RunArgs {
  std::string input;
  std::string mode = "offline";
  std::size_t k = 1;
  std::string backend = "exact";
  double epsilon = 0.2;
  double delta = 0.05;
  double lambda = 0.1;
  double g = 64.0;
  std::optional<std::size_t> sample1;
  double kappa = 1.0 / 3.0;
  double rho_f = 0.5;
  std::optional<std::size_t> reservoir;
  std::optional<std::size_t> coreset_cap;
  bool uncapped = false;
  bool paper_constants = false;
  std::string reconstruct = "strict";
  std::uint64_t seed = 0;
  std::string preset;
  bool verify = false;
  bool timing = false;
  std::string out;
};

struct OracleArgs {
  std::string input;
  std::size_t k = 1;
  std::string out;
};

struct BenchArgs {
  std::size_t n = 6;
  std::size_t m = 6;
  std::string ratio = "1:1";
  std::size_t centers = 1;
  double noise = 0.2;
  std::size_t instances = 5;
  std::size_t k = 1;
  std::string backend = "exact";
  std::uint64_t seed = 0;
  std::string out;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fcc::Error(fcc::ErrorKind::Argument, "cannot write " + path);
  out << text;
}

struct LoadedInput {
  fcc::ClusteringFile file;
  fcc::StreamMode mode = fcc::StreamMode::Contiguous;
};

LoadedInput load_input(const std::string& path) {
  LoadedInput loaded;
  if (fcc::detect_file_kind(path) == fcc::FileKind::Clusterings) {
    loaded.file = fcc::read_clustering_file(path);
    return loaded;
  }
  std::ifstream in(path, std::ios::binary);
  fcc::PcsReader reader(in);
  const auto& h = reader.header();
  loaded.mode = h.mode;
  loaded.file.colors = h.colors;
  loaded.file.constraint = h.constraint;
  std::vector<std::vector<fcc::StoredPair>> pairs(h.m);
  fcc::StreamTriple t;
  while (reader.next(t)) pairs[t.j].push_back({t.u, t.v, t.b});
  for (const auto& list : pairs) {
    loaded.file.clusterings.push_back(fcc::reconstruct(h.n, list).clustering);
  }
  return loaded;
}

fcc::ClosestFairBackend make_backend(const std::string& name) {
  return fcc::ClosestFairBackend{fcc::parse_fair_mode(name)};
}

json preset_json(const fcc::Preset& p) {
  auto framework = [](const fcc::FrameworkParams& f) {
    return json{{"alpha", f.alpha}, {"beta", f.beta}, {"c", f.c}, {"s", f.s}, {"g", f.g}};
  };
  return {{"name", p.name},
          {"regime", p.regime},
          {"gamma", p.gamma},
          {"offline", framework(p.offline)},
          {"streaming", framework(p.streaming)},
          {"offline_ratio", p.offline_ratio},
          {"streaming_ratio", p.streaming_ratio}};
}

void empirical_factors(fcc::RunReport& report, const fcc::ClusteringFile& file,
                       const fcc::RunOptions& options) {
  const std::size_t n = file.colors.size();
  if (options.backend.mode == fcc::FairMode::Exact) {
    report.gamma_emp = 1.0;
  } else if (n <= 10) {
    double worst = 1.0;
    for (const auto& c : file.clusterings) {
      const auto exact = fcc::exact_closest_fair(c, file.colors, file.constraint).distance;
      const auto heuristic = fcc::closest_fair(c, file.colors, file.constraint, options.backend).distance;
      if (exact > 0) worst = std::max(worst, static_cast<double>(heuristic) / static_cast<double>(exact));
    }
    report.gamma_emp = worst;
  }
  if (n <= options.correlation.exact_guard) report.rho_emp = 1.0;
}

void verify(fcc::RunReport& report, const fcc::ClusteringFile& file, bool exact_objective) {
  for (const auto& c : report.solution) {
    if (!fcc::is_fair(c, file.colors, file.constraint)) {
      throw fcc::Error(fcc::ErrorKind::Inconsistent, "reported solution is not fair");
    }
  }
  const fcc::InputSet inputs(file.clusterings);
  const std::uint64_t value = fcc::objective(inputs, report.solution);
  report.verified_objective = value;
  if (exact_objective && static_cast<double>(value) != report.objective) {
    throw fcc::Error(fcc::ErrorKind::Inconsistent,
                     "re-evaluated objective " + std::to_string(value) +
                         " differs from the reported " + std::to_string(report.objective));
  }
}

template <typename Consumer>
void replay(const std::string& path, const LoadedInput& loaded, Consumer& consumer) {
  if (fcc::detect_file_kind(path) == fcc::FileKind::Stream) {
    std::ifstream in(path, std::ios::binary);
    fcc::PcsReader reader(in);
    fcc::StreamTriple t;
    while (reader.next(t)) consumer.consume(t);
    return;
  }
  for (std::size_t j = 0; j < loaded.file.clusterings.size(); ++j) {
    for (const auto& t : fcc::encode_triples(loaded.file.clusterings[j], static_cast<std::uint32_t>(j))) {
      consumer.consume(t);
    }
  }
}

fcc::RunReport run(const RunArgs& args, bool g_given) {
  const auto start = Clock::now();
  const LoadedInput loaded = load_input(args.input);
  const auto& file = loaded.file;
  const std::size_t n = file.colors.size();

  std::optional<fcc::Preset> preset;
  if (!args.preset.empty()) {
    preset = fcc::find_preset(args.preset);
    if (!preset) throw fcc::Error(fcc::ErrorKind::Argument, "unknown preset '" + args.preset + "'");
  }

  fcc::RunOptions options;
  options.backend = make_backend(args.backend);
  options.seed = args.seed;

  fcc::RunReport report;
  report.k = args.k;
  report.seed = args.seed;
  report.backend = std::string(fcc::to_string(options.backend.mode));
  report.params = {{"mode", args.mode}, {"input_mode", std::string(fcc::to_string(loaded.mode))},
                   {"n", n}, {"m", file.clusterings.size()},
                   {"ratio", file.constraint.to_string()}};
  if (preset) report.params["preset"] = preset_json(*preset);
  bool exact_objective = true;

  if (args.mode == "offline") {
    const fcc::InputSet inputs(file.clusterings);
    const double gamma = options.backend.gamma_claim().value_or(preset ? preset->gamma : 1.0);
    const auto framework = fcc::FrameworkParams::offline_default(gamma);
    report.params["framework"] = {{"alpha", framework.alpha}, {"beta", framework.beta}, {"c", framework.c}};
    if (args.k == 1) {
      auto result = fcc::consensus_1median(inputs, file.colors, file.constraint, options);
      report.algorithm = "offline-1median";
      report.objective = static_cast<double>(result.objective);
      report.candidates = result.candidates;
      report.candidates_distinct = result.distinct_candidates;
      report.evaluated = result.distinct_candidates;
      report.solution = {result.clustering};
    } else {
      auto result = fcc::consensus_kmedian(inputs, args.k, file.colors, file.constraint, options);
      report.algorithm = "offline-kmedian";
      report.objective = static_cast<double>(result.objective);
      report.candidates = result.candidates;
      report.candidates_distinct = result.distinct_candidates;
      report.evaluated = result.subsets_evaluated;
      report.solution = result.centers;
    }
    report.peaks = {{"inputs", file.clusterings.size()}};
  } else if (args.mode == "stream") {
    fcc::StreamHeader header{n, file.clusterings.size(), file.colors, file.constraint, loaded.mode};
    exact_objective = false;
    if (args.k == 1) {
      fcc::St1MedParams params;
      params.sample1_count = args.sample1;
      params.epsilon = args.epsilon;
      params.g = (!g_given && preset) ? preset->streaming.g : args.g;
      params.reconstruct = args.reconstruct == "validate" ? fcc::ReconstructMode::Validate
                                                          : fcc::ReconstructMode::Strict;
      fcc::St1Med algo(header, params, options);
      replay(args.input, loaded, algo);
      auto result = algo.finish();
      const auto& r = result.report;
      report.algorithm = "st-1med";
      report.params["epsilon"] = params.epsilon;
      report.params["g"] = params.g;
      report.objective = r.sample2_count == 0
                             ? 0.0
                             : static_cast<double>(r.sample_objective) *
                                   static_cast<double>(header.m) / static_cast<double>(r.sample2_count);
      report.candidates = r.candidates;
      report.candidates_distinct = r.distinct_candidates;
      report.evaluated = r.distinct_candidates;
      report.peaks = {{"store1", r.peak_store1}, {"store2", r.peak_store2},
                      {"budget", r.sample1_count + r.sample2_count}};
      report.details = {{"sample1_count", r.sample1_count},
                        {"sample2_count", r.sample2_count},
                        {"sample1_clamped", r.sample1_clamped},
                        {"sample2_clamped", r.sample2_clamped},
                        {"pairs_stored", r.pairs_stored},
                        {"triples_seen", r.triples_seen},
                        {"contradictions", r.contradictions},
                        {"sample_objective", r.sample_objective}};
      report.solution = {result.clustering};
    } else {
      fcc::StreamKMedianParams params;
      if (args.uncapped) params = fcc::uncapped_kmedian_params(args.k);
      params.k = args.k;
      params.grid.delta = args.delta;
      params.grid.lambda = args.lambda;
      params.faraway.kappa = args.kappa;
      params.faraway.rho = args.rho_f;
      params.faraway.reservoir_size = args.reservoir;
      params.coreset.epsilon = args.epsilon;
      params.coreset.cap = args.coreset_cap;
      if (args.paper_constants) {
        const auto constants = fcc::stream_kmedian_paper_constants(preset ? preset->gamma : 1.0);
        params.grid.delta = constants.delta;
        params.epsilon1 = constants.epsilon1;
      }
      fcc::StreamKMedian algo(header, params, options);
      replay(args.input, loaded, algo);
      auto result = algo.finish();
      const auto& r = result.report;
      report.algorithm = "stream-kmedian";
      report.params["epsilon"] = params.coreset.epsilon;
      report.params["delta"] = params.grid.delta;
      report.params["lambda"] = params.grid.lambda;
      report.params["kappa"] = params.faraway.kappa;
      report.params["rho_f"] = params.faraway.rho;
      report.params["epsilon1"] = params.epsilon1;
      report.params["uncapped"] = args.uncapped;
      report.objective = r.coreset_objective;
      report.candidates = r.candidates;
      report.candidates_distinct = r.distinct_candidates;
      report.evaluated = r.subsets_evaluated;
      report.peaks = {{"grid", r.peak_grid}, {"faraway", r.peak_faraway},
                      {"coreset", r.peak_coreset}, {"total", r.peak_stored},
                      {"budget", r.space_budget}};
      report.details = {{"sample_size", r.sample_size},
                        {"faraway_size", r.faraway_size},
                        {"coreset_size", r.coreset_size},
                        {"grid_cells", r.grid_cells},
                        {"grid_live_cells", r.grid_live_cells},
                        {"grid_reset_cap", r.grid_reset_cap},
                        {"grid_resets", r.grid_resets},
                        {"faraway_capacity", r.faraway_capacity},
                        {"coreset_cap", r.coreset_cap},
                        {"coreset_bound", r.coreset_bound},
                        {"triples_seen", r.triples_seen}};
      report.solution = result.centers;
    }
  } else {
    throw fcc::Error(fcc::ErrorKind::Argument, "mode must be offline or stream");
  }

  empirical_factors(report, file, options);
  if (args.verify) verify(report, file, exact_objective);
  if (args.timing) {
    report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  }
  return report;
}

fcc::RunReport oracle(const OracleArgs& args) {
  const LoadedInput loaded = load_input(args.input);
  const auto& file = loaded.file;
  const fcc::InputSet inputs(file.clusterings);
  auto opt = fcc::oracle::opt_fair_consensus(inputs, args.k, file.colors, file.constraint);
  fcc::RunReport report;
  report.algorithm = "oracle";
  report.k = args.k;
  report.backend = "exhaustive";
  report.params = {{"n", inputs.num_points()}, {"m", inputs.size()},
                   {"ratio", file.constraint.to_string()},
                   {"fair_partitions", opt.fair_partitions}};
  report.objective = static_cast<double>(opt.objective);
  report.verified_objective = fcc::objective(inputs, opt.centers);
  report.details = {{"avg", static_cast<double>(opt.objective) / static_cast<double>(inputs.size())}};
  report.solution = opt.centers;
  return report;
}

std::string bench(const BenchArgs& args) {
  std::ostringstream csv;
  csv << "instance,algo,objective,ratio_vs_oracle,peak_store,millis\n";
  fcc::RunOptions options;
  options.backend = make_backend(args.backend);
  options.seed = args.seed;
  for (std::size_t i = 0; i < args.instances; ++i) {
    fcc::GenParams gen;
    gen.n = args.n;
    gen.m = args.m;
    gen.constraint = fcc::FairnessConstraint::parse(args.ratio);
    gen.centers = args.centers;
    gen.noise = args.noise;
    gen.seed = fcc::derive_seed(args.seed, "bench", i);
    const auto file = fcc::generate(gen);
    const fcc::InputSet inputs(file.clusterings);

    std::optional<std::uint64_t> opt;
    if (args.n <= fcc::oracle::kConsensusGuard) {
      try {
        opt = fcc::oracle::opt_fair_consensus(inputs, args.k, file.colors, file.constraint).objective;
      } catch (const fcc::Error&) {
      }
    }
    auto row = [&](const std::string& algo, std::uint64_t value, std::size_t peak, Clock::time_point t0) {
      const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      csv << i << ',' << algo << ',' << value << ',';
      if (opt) {
        if (*opt > 0) {
          csv << static_cast<double>(value) / static_cast<double>(*opt);
        } else {
          csv << (value == 0 ? "1" : "inf");
        }
      }
      csv << ',' << peak << ',' << ms << '\n';
    };
    if (opt) row("oracle", *opt, file.clusterings.size(), Clock::now());

    auto t0 = Clock::now();
    if (args.k == 1) {
      auto r = fcc::consensus_1median(inputs, file.colors, file.constraint, options);
      row("offline-1median", r.objective, file.clusterings.size(), t0);
    } else {
      auto r = fcc::consensus_kmedian(inputs, args.k, file.colors, file.constraint, options);
      row("offline-kmedian", r.objective, file.clusterings.size(), t0);
    }

    fcc::StreamHeader header{args.n, args.m, file.colors, file.constraint, fcc::StreamMode::Contiguous};
    t0 = Clock::now();
    if (args.k == 1) {
      fcc::St1Med algo(header, fcc::St1MedParams{}, options);
      for (std::size_t j = 0; j < file.clusterings.size(); ++j) {
        for (const auto& t : fcc::encode_triples(file.clusterings[j], static_cast<std::uint32_t>(j))) algo.consume(t);
      }
      auto r = algo.finish();
      row("st-1med", fcc::objective(inputs, r.clustering), r.report.peak_store1 + r.report.peak_store2, t0);
    } else {
      fcc::StreamKMedianParams params;
      params.k = args.k;
      fcc::StreamKMedian algo(header, params, options);
      for (std::size_t j = 0; j < file.clusterings.size(); ++j) {
        algo.consume_clustering(file.clusterings[j], static_cast<std::uint32_t>(j));
      }
      auto r = algo.finish();
      row("stream-kmedian", fcc::objective(inputs, r.centers), r.report.peak_stored, t0);
    }
  }
  return csv.str();
}

int fail(const fcc::Error& e) {
  std::cout << fcc::error_json(e).dump() << '\n';
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair consensus clustering: offline and streaming 1-median / k-median"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a planted instance");
  gen_cmd->add_option("--n", gen.n, "Number of points")->required();
  gen_cmd->add_option("--m", gen.m, "Number of input clusterings")->required();
  gen_cmd->add_option("--ratio", gen.ratio, "Color ratio r0:r1:...");
  gen_cmd->add_option("--centers", gen.centers, "Planted fair centers");
  gen_cmd->add_option("--noise", gen.noise, "Fraction of points moved per input");
  gen_cmd->add_option("--seed", gen.seed, "Seed");
  gen_cmd->add_option("--out", gen.out, "Clustering file (FCC1)");
  gen_cmd->add_option("--stream", gen.stream_out, "Also write a PCS1 stream here");
  gen_cmd->add_option("--stream-mode", gen.stream_mode, "contiguous | general");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run an algorithm and write a JSON report");
  run_cmd->add_option("--input", run_args.input, "FCC1 or PCS1 file")->required();
  run_cmd->add_option("--mode", run_args.mode, "offline | stream");
  run_cmd->add_option("--k", run_args.k, "Number of representatives");
  run_cmd->add_option("--backend", run_args.backend, "exact | repair");
  run_cmd->add_option("--epsilon", run_args.epsilon, "Evaluation / coreset accuracy in (0,1)");
  run_cmd->add_option("--delta", run_args.delta, "Grid separation factor");
  run_cmd->add_option("--lambda", run_args.lambda, "Grid rate");
  auto* g_opt = run_cmd->add_option("--g", run_args.g, "Candidate store factor g");
  run_cmd->add_option("--sample1", run_args.sample1, "Candidate store size override");
  run_cmd->add_option("--kappa", run_args.kappa, "Faraway kappa");
  run_cmd->add_option("--rho-f", run_args.rho_f, "Faraway additive slack");
  run_cmd->add_option("--reservoir", run_args.reservoir, "Faraway reservoir size override");
  run_cmd->add_option("--coreset-cap", run_args.coreset_cap, "Coreset bucket size override");
  run_cmd->add_flag("--uncapped", run_args.uncapped, "Disable grid resets and coreset reduction");
  run_cmd->add_flag("--paper-constants", run_args.paper_constants,
                    "Use the published delta and epsilon1 for streaming k-median");
  run_cmd->add_option("--reconstruct", run_args.reconstruct, "strict | validate");
  run_cmd->add_option("--seed", run_args.seed, "Seed");
  run_cmd->add_option("--preset", run_args.preset, "paper-1to1 | paper-1top | paper-ptoq");
  run_cmd->add_flag("--verify", run_args.verify, "Re-evaluate the solution against the input");
  run_cmd->add_flag("--timing", run_args.timing, "Include wall time in the report");
  run_cmd->add_option("--out", run_args.out, "Report path (default stdout)");

  OracleArgs oracle_args;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact fair k-median by enumeration");
  oracle_cmd->add_option("--input", oracle_args.input, "FCC1 or PCS1 file")->required();
  oracle_cmd->add_option("--k", oracle_args.k, "Number of representatives");
  oracle_cmd->add_option("--out", oracle_args.out, "Report path (default stdout)");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Benchmark algorithms on generated instances (CSV)");
  bench_cmd->add_option("--n", bench_args.n, "Number of points");
  bench_cmd->add_option("--m", bench_args.m, "Number of input clusterings");
  bench_cmd->add_option("--ratio", bench_args.ratio, "Color ratio");
  bench_cmd->add_option("--centers", bench_args.centers, "Planted centers");
  bench_cmd->add_option("--noise", bench_args.noise, "Noise rate");
  bench_cmd->add_option("--instances", bench_args.instances, "Number of instances");
  bench_cmd->add_option("--k", bench_args.k, "Number of representatives");
  bench_cmd->add_option("--backend", bench_args.backend, "exact | repair");
  bench_cmd->add_option("--seed", bench_args.seed, "Seed");
  bench_cmd->add_option("--out", bench_args.out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_cmd->parsed()) {
      fcc::GenParams params;
      params.n = gen.n;
      params.m = gen.m;
      params.constraint = fcc::FairnessConstraint::parse(gen.ratio);
      params.centers = gen.centers;
      params.noise = gen.noise;
      params.seed = gen.seed;
      const auto file = fcc::generate(params);
      std::ostringstream text;
      fcc::write_clustering_file(text, file);
      if (!gen.out.empty() || gen.stream_out.empty()) emit(text.str(), gen.out);
      if (!gen.stream_out.empty()) {
        std::ostringstream stream;
        fcc::write_stream_file(stream, file, fcc::parse_stream_mode(gen.stream_mode), gen.seed);
        emit(stream.str(), gen.stream_out);
      }
    } else if (run_cmd->parsed()) {
      emit(fcc::to_json(run(run_args, g_opt->count() > 0)).dump(2) + "\n", run_args.out);
    } else if (oracle_cmd->parsed()) {
      emit(fcc::to_json(oracle(oracle_args)).dump(2) + "\n", oracle_args.out);
    } else if (bench_cmd->parsed()) {
      emit(bench(bench_args), bench_args.out);
    }
  } catch (const fcc::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cout << fcc::error_json(fcc::ErrorKind::Argument, e.what()).dump() << '\n';
    return 2;
  }
  return 0;
}
