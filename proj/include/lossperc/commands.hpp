#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lossperc/io.hpp"
#include "lossperc/lattice.hpp"
#include "lossperc/models.hpp"
#include "lossperc/statistics.hpp"

namespace lossperc {

/// Invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitConfig = 2, kExitIo = 3 };

struct RunConfig {
  LatticeSpec lattice;
  /// Sizes for the threshold command; empty means {lattice.size}.
  std::vector<int> sizes;
  ModelParams params;
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
  std::vector<double> grid;
  /// Output path prefix; commands append their extensions.
  std::string out = "lossperc";
  /// 0 uses the available hardware parallelism. Not part of the config hash.
  unsigned workers = 0;
  std::string suite = "default";
  double scale = 1.0;
  bool corrupt_lattice = false;
  std::vector<std::size_t> bench_n_eta{1, 10, 100, 1000};
  std::vector<std::size_t> bench_nodes{10'000, 100'000, 1'000'000};
  std::size_t bench_repeats = 3;

  /// Throws ConfigError.
  void check() const;
};

/// "min:max:count" (uniform, endpoints included) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

/// Hash over every field that affects the data (not workers or paths).
std::string config_hash(const RunConfig& config, const std::string& command);

/// Writes <out>.csv (curve) and <out>.json (metadata).
int cmd_sweep(const RunConfig& config, std::ostream& log);

struct ThresholdStudy {
  std::vector<SizeThreshold> per_size;
  std::optional<Extrapolation> extrapolation;
  std::vector<std::string> warnings;
  double wall_time_s = 0.0;
};

/// Per-size threshold estimates and, with three or more sizes, the
/// infinite-size extrapolation. Throws ConfigError if some size never spans.
ThresholdStudy run_threshold_study(const RunConfig& config);

/// Writes <out>.csv (per-size table) and <out>.json (extrapolation).
int cmd_threshold(const RunConfig& config, std::ostream& log);

/// Runs the named suite; writes <out>.txt and <out>.json. Returns 1 on failure.
int cmd_verify(const RunConfig& config, std::ostream& log);

struct BenchReport {
  std::vector<BenchRow> rows;
  /// (max - min) / min of the sweep-based times across the n_eta values.
  double sweep_variation = 0.0;
  /// Baseline time at the largest n_eta over the smallest.
  double baseline_growth = 0.0;
  /// Largest time ratio per decade of node count.
  double worst_decade_ratio = 0.0;
};

/// Runtime scaling experiments on the simple cubic fusion lattice (model
/// 2'): sweep + transform versus rerunning the direct sampler per grid
/// point, and sweep time versus node count. Single worker.
BenchReport run_bench(const RunConfig& config);

/// Writes <out>.csv and <out>.json.
int cmd_bench(const RunConfig& config, std::ostream& log);

/// Builds and validates the lattice; writes <out>.edges.
int cmd_lattice(const RunConfig& config, std::ostream& log);

}  // namespace lossperc
