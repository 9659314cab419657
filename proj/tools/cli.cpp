#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>

#include "atomchain/config.hpp"
#include "atomchain/couplings.hpp"
#include "atomchain/csv.hpp"
#include "atomchain/error.hpp"
#include "atomchain/oracles.hpp"
#include "atomchain/specfun.hpp"

namespace atomchain::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::string out;
  int stride = 0;
  bool wide = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--stride", f.stride, "Record every N integration steps")->check(CLI::PositiveNumber);
  cmd->add_flag("--wide", f.wide, "Add per-site population columns");
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
}

ProtocolConfig load(const Flags& f, std::optional<Scenario> scenario, std::ostream& err) {
  ProtocolConfig c;
  if (!f.config.empty()) {
    ParsedConfig parsed = parse_config(f.config);
    for (const auto& w : parsed.warnings) err << "warning: " << w << '\n';
    c = std::move(parsed.config);
    if (scenario && *scenario != c.scenario) {
      throw Error(ErrorKind::ValidationError,
                  "scenario '" + std::string(to_string(*scenario)) + "' does not match config scenario '" +
                      std::string(to_string(c.scenario)) + "'");
    }
  } else {
    c = default_config(scenario.value_or(Scenario::BandSweep));
  }
  if (!f.out.empty()) c.output.dir = f.out;
  if (f.stride > 0) c.integration.stride = f.stride;
  if (f.wide) c.integration.keep_sites = true;
  if (f.threads > 0) c.grid.threads = f.threads;
  c.validate();
  return c;
}

void finish(const ProtocolConfig& c, std::vector<fs::path> outputs,
            std::chrono::steady_clock::time_point start, std::ostream& out) {
  RunManifest m;
  m.config_hash = config_hash(c);
  m.tool_version = std::string(version());
  m.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.outputs = outputs;
  const fs::path path = c.output.dir / (c.output.prefix + "_manifest.txt");
  write_file_atomically(path, [&](std::ostream& s) { write_manifest(s, m); });
  for (const auto& p : outputs) out << "wrote " << p.string() << '\n';
  out << "wrote " << path.string() << '\n';
}

int cmd_bands(const Flags& f, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ProtocolConfig c = load(f, std::nullopt, err);
  const BandStructure bands = band_sweep(c.chain, c.field, c.grid);
  fs::create_directories(c.output.dir);
  const fs::path csv = c.output.dir / (c.output.prefix + "_bands.csv");
  write_file_atomically(csv, [&](std::ostream& s) { write_bands_csv(s, bands); });
  if (!bands.dropped.empty()) {
    err << "note: " << bands.dropped.size() << " grid nodes next to the light line were skipped\n";
  }
  finish(c, {csv}, start, out);
  return 0;
}

int cmd_run(const Flags& f, std::optional<Scenario> scenario, std::ostream& out,
            std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  ProtocolConfig c = load(f, scenario, err);
  if (c.scenario == Scenario::BandSweep) return cmd_bands(f, out, err);
  const ProtocolResult r = run_protocol(c);
  for (const auto& w : r.summary.warnings) err << "warning: " << w << '\n';
  fs::create_directories(c.output.dir);
  const fs::path csv = c.output.dir / (c.output.prefix + "_trajectory.csv");
  const fs::path summary = c.output.dir / (c.output.prefix + "_summary.txt");
  write_file_atomically(csv, [&](std::ostream& s) {
    write_trajectory_csv(s, *r.record, c.integration.keep_sites);
  });
  write_file_atomically(summary, [&](std::ostream& s) { write_summary(s, r.summary); });
  write_summary(out, r.summary);
  finish(c, {csv, summary}, start, out);
  return 0;
}

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

int cmd_selfcheck(std::ostream& out) {
  std::vector<Check> checks;
  auto run = [&](const std::string& name, auto&& body) {
    try {
      auto [ok, detail] = body();
      checks.push_back({name, ok, detail});
    } catch (const std::exception& e) {
      checks.push_back({name, false, e.what()});
    }
  };

  run("polylog_series", [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> phi(1e-3, 2.0 * kPi - 1e-3);
    double worst = 0.0;
    for (int m = 1; m <= 3; ++m) {
      for (int i = 0; i < 100; ++i) {
        const double p = phi(rng);
        worst = std::max(worst, std::abs(specfun::polylog_unit_circle(m, specfun::PhaseAngle(p)) -
                                         oracles::polylog_series(m, p)));
      }
    }
    return std::pair<bool, std::string>{worst <= 1e-10, "max error " + format_double(worst)};
  });

  run("dft_consistency", [] {
    const ChainParams p;
    const MomentumKernel kernel(p);
    double worst = 0.0;
    for (double k : {4.4 * kPi, 5.0 * kPi, 5.6 * kPi, 6.0 * kPi}) {
      worst = std::max(worst, std::abs(kernel.value(k) - oracles::lattice_sum_cesaro(p, k, 200000)));
    }
    return std::pair<bool, std::string>{worst <= 1e-3, "max deviation " + format_double(worst)};
  });

  run("decay_psd", [] {
    double worst = 0.0;
    for (int n : {1, 2, 10, 100}) {
      ChainParams p;
      p.N = n;
      worst = std::min(worst, oracles::decay_min_eigenvalue(p));
    }
    return std::pair<bool, std::string>{worst >= -1e-10, "min eigenvalue " + format_double(worst)};
  });

  run("finite_chain_bands", [] {
    ChainParams p;
    p.N = 150;
    ControlField field;
    field.theta = 0.5 * kPi;
    const oracles::BandMatch m = oracles::finite_chain_band_match(p, field, 1e-3, 0.1, 2000);
    return std::pair{m.matched > 0 && m.max_deviation <= 2e-2,
                     std::to_string(m.matched) + " states, max deviation " +
                         format_double(m.max_deviation)};
  });

  bool all = true;
  for (const Check& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    all = all && c.pass;
  }
  return all ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-excitation transport in driven subwavelength atomic chains", "atomchain"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Flags f;

  CLI::App* bands = app.add_subcommand("bands", "Band structure sweep to CSV");
  bands->add_option("--config", f.config, "Config file")->check(CLI::ExistingFile);
  add_common(bands, f);

  CLI::App* evolve = app.add_subcommand("evolve", "Single run to trajectory CSV and summary");
  evolve->add_option("--config", f.config, "Config file")->required()->check(CLI::ExistingFile);
  add_common(evolve, f);

  std::string name;
  CLI::App* protocol = app.add_subcommand("protocol", "Named scenario");
  protocol->add_option("name", name, "free, trap-release, trap-reflect or band-sweep")->required();
  protocol->add_option("--config", f.config, "Config file")->check(CLI::ExistingFile);
  add_common(protocol, f);

  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run the numerical oracle suite");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*bands) return cmd_bands(f, out, err);
    if (*evolve) return cmd_run(f, std::nullopt, out, err);
    if (*protocol) return cmd_run(f, parse_scenario(name), out, err);
    if (*selfcheck) return cmd_selfcheck(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.kind()) ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace atomchain::cli
