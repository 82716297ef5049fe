#include "lossperc/cli.hpp"

#include <ostream>

#include "CLI11.hpp"
#include "lossperc/commands.hpp"

namespace lossperc {

namespace {

struct RawOptions {
  std::string lattice = "hypercubic";
  int dim = 2;
  int size = 16;
  std::vector<int> sizes;
  std::vector<std::string> boundary;
  std::vector<std::string> neighborhood;
  std::string model = "model2prime";
  double ps = 0.5;
  int nmax = 1;
  int boost_n = 1;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::string grid = "0:1:101";
  std::string out = "lossperc";
  unsigned workers = 0;
  std::string suite = "default";
  double scale = 1.0;
  bool corrupt_lattice = false;
  std::vector<std::size_t> n_eta{1, 10, 100, 1000};
  std::vector<std::size_t> nodes{10'000, 100'000, 1'000'000};
  std::size_t repeats = 3;
};

void add_options(CLI::App& app, RawOptions& o) {
  app.add_option("--lattice", o.lattice, "hypercubic|square|cubic|diamond|bcc|fcc|extended_hypercubic|rhg")
      ->capture_default_str();
  app.add_option("--dim", o.dim, "Dimension")->capture_default_str();
  app.add_option("--size", o.size, "Unit cells per axis")->capture_default_str();
  app.add_option("--sizes", o.sizes, "Sizes for the threshold command, e.g. 16,32,64")->delimiter(',');
  app.add_option("--boundary", o.boundary,
                 "Per-axis open|periodic list, or one value for every axis (default: axis 0 open, rest periodic)")
      ->delimiter(',');
  app.add_option("--neighborhood", o.neighborhood, "Displacement classes for extended_hypercubic, e.g. 1,11")
      ->delimiter(',');
  app.add_option("--model", o.model, "bond|site|model1|model2|model2prime|model3|boosted")->capture_default_str();
  app.add_option("--ps", o.ps, "Fusion success probability")->capture_default_str();
  app.add_option("--nmax", o.nmax, "Maximum fusion attempts (model3)")->capture_default_str();
  app.add_option("--boost-n", o.boost_n, "Boost level: 2^n photons per fusion (boosted)")->capture_default_str();
  app.add_option("--reps", o.reps, "Repetitions")->capture_default_str();
  app.add_option("--seed", o.seed, "Base seed; run r uses seed + r")->capture_default_str();
  app.add_option("--grid", o.grid, "min:max:count or comma-separated values")->capture_default_str();
  app.add_option("--out", o.out, "Output path prefix")->capture_default_str();
  app.add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--suite", o.suite, "Verification suite or single check name")->capture_default_str();
  app.add_option("--scale", o.scale, "Verification effort multiplier")->capture_default_str();
  app.add_flag("--corrupt-lattice", o.corrupt_lattice, "Fault injection for the lattice structure check");
  app.add_option("--n-eta", o.n_eta, "Bench: grid sizes")->delimiter(',')->capture_default_str();
  app.add_option("--nodes", o.nodes, "Bench: target node counts")->delimiter(',')->capture_default_str();
  app.add_option("--repeats", o.repeats, "Bench: timing repeats (minimum is kept)")->capture_default_str();
}

RunConfig to_config(const RawOptions& o, bool dim_given, bool need_grid) {
  RunConfig c;
  try {
    c.lattice.family = parse_family(o.lattice);
    c.lattice.dimension = o.dim;
    // The square and cubic aliases fix the dimension.
    const int implied = o.lattice == "square" ? 2 : (o.lattice == "cubic" || o.lattice == "sc") ? 3 : 0;
    if (implied != 0) {
      if (dim_given && o.dim != implied) throw ConfigError("--lattice " + o.lattice + " conflicts with --dim");
      c.lattice.dimension = implied;
    }
    c.lattice.size = o.size;
    if (o.boundary.size() == 1) {
      c.lattice.boundary.assign(c.lattice.dimension, parse_boundary(o.boundary.front()));
    } else {
      for (const auto& b : o.boundary) c.lattice.boundary.push_back(parse_boundary(b));
    }
    for (const auto& n : o.neighborhood) c.lattice.neighborhood.push_back(parse_displacement_class(n));
    c.params.model = parse_model(o.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.sizes = o.sizes;
  c.params.p_s = o.ps;
  c.params.n_max = o.nmax;
  c.params.boost_n = o.boost_n;
  c.repetitions = o.reps;
  c.seed = o.seed;
  if (need_grid) c.grid = parse_grid(o.grid);
  c.out = o.out;
  c.workers = o.workers;
  c.suite = o.suite;
  c.scale = o.scale;
  c.corrupt_lattice = o.corrupt_lattice;
  c.bench_n_eta = o.n_eta;
  c.bench_nodes = o.nodes;
  c.bench_repeats = o.repeats;
  c.check();
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-loss percolation simulations with Newman-Ziff sweeps", "lossperc"};
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags; flags win");
  app.require_subcommand(1);
  app.fallthrough();
  RawOptions o;
  add_options(app, o);
  auto* sweep = app.add_subcommand("sweep", "Canonical curve (CSV) and run metadata (JSON)");
  auto* threshold = app.add_subcommand("threshold", "Per-size thresholds and infinite-size extrapolation");
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  auto* bench = app.add_subcommand("bench", "Runtime scaling experiments");
  auto* lattice = app.add_subcommand("lattice", "Build, validate and export a lattice edge list");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const bool dim_given = app.count("--dim") > 0;
  try {
    if (sweep->parsed()) return cmd_sweep(to_config(o, dim_given, true), out);
    if (threshold->parsed()) return cmd_threshold(to_config(o, dim_given, false), out);
    if (verify->parsed()) return cmd_verify(to_config(o, dim_given, false), out);
    if (bench->parsed()) return cmd_bench(to_config(o, dim_given, false), out);
    if (lattice->parsed()) return cmd_lattice(to_config(o, dim_given, false), out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 4;
  }
  return kExitConfig;
}

}  // namespace lossperc
