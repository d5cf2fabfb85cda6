// mpid: benchmark driver for mixed-precision interpolative decompositions.
//
//   mpid sweep-rank  error vs target rank
//   mpid sweep-cols  error vs column dimension at fixed rank
//   mpid rom         column-skeleton reduced-order model, per-column MSE
//   mpid gen         write a synthetic decay matrix to CSV or RAW
//
// Exit codes: 0 ok, 1 configuration error, 2 I/O error, 3 every cell failed.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "mpid/harness/config.hpp"
#include "mpid/harness/experiments.hpp"
#include "mpid/harness/io.hpp"
#include "mpid/harness/report.hpp"
#include "mpid/synth.hpp"

namespace {

using namespace mpid;
using namespace mpid::harness;

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_io = 2;
constexpr int exit_all_failed = 3;

const char* const setting_keys[] = {"dataset", "variants", "k",    "n",    "baseline", "seed",   "seeds",
                                    "pinv-precision", "rows", "cols", "columns", "out", "svg"};

struct SweepCommand {
  CLI::App* app = nullptr;
  Experiment experiment{};
  std::map<std::string, std::string> values{};
  std::string config_path{};
  bool header = false;
};

void add_sweep_options(SweepCommand& cmd) {
  auto* app = cmd.app;
  app->add_option("--config", cmd.config_path, "key = value settings file (flags override it)");
  app->add_option("--dataset", cmd.values["dataset"], "slow | medium | fast | file:PATH");
  app->add_option("--variants", cmd.values["variants"], "comma list of double,single,half,mixed_single,mixed_half");
  app->add_option("--k", cmd.values["k"], "target ranks, e.g. 5:51:2 or 10,20,40");
  app->add_option("--n", cmd.values["n"], "column dimensions, e.g. 100:1000:100");
  app->add_option("--baseline", cmd.values["baseline"], "double | truth");
  app->add_option("--seed", cmd.values["seed"], "base seed (default $MPID_SEED or 1)");
  app->add_option("--seeds", cmd.values["seeds"], "number of consecutive seeds");
  app->add_option("--pinv-precision", cmd.values["pinv-precision"], "double | ctx");
  app->add_option("--rows", cmd.values["rows"], "synthetic row count");
  app->add_option("--cols", cmd.values["cols"], "synthetic column count");
  app->add_option("--columns", cmd.values["columns"], "rom: 1-based held-out columns");
  app->add_option("--out", cmd.values["out"], "CSV output path (stdout if omitted)");
  app->add_option("--svg", cmd.values["svg"], "SVG chart output path");
  app->add_flag("--header", cmd.header, "skip the first line of a CSV dataset file");
}

ExperimentConfig build_config(const SweepCommand& cmd) {
  ExperimentConfig cfg = ExperimentConfig::defaults(cmd.experiment);
  if (!cmd.config_path.empty()) apply_config_text(cfg, read_file(cmd.config_path));
  for (const char* key : setting_keys)
    if (cmd.app->count(std::string("--") + key) > 0) apply_setting(cfg, key, cmd.values.at(key));
  if (cmd.header) cfg.csv_header = true;
  cfg.validate();
  return cfg;
}

int run_sweep(const SweepCommand& cmd) {
  const ExperimentConfig cfg = build_config(cmd);
  const std::vector<ResultRow> rows = run_experiment(cfg);
  if (rows.empty()) throw ConfigError("configuration produced no cells");

  if (cfg.out.empty()) {
    std::cout << format_csv(rows);
  } else {
    emit_csv(rows, cfg.out);
  }
  if (!cfg.svg.empty()) emit_svg(rows, cfg.svg);

  std::size_t failed = 0;
  for (const ResultRow& r : rows) failed += r.ok() ? 0 : 1;
  std::cerr << name(cfg.experiment) << ": " << rows.size() << " rows, " << failed << " not ok\n";
  return failed == rows.size() ? exit_all_failed : exit_ok;
}

struct GenCommand {
  CLI::App* app = nullptr;
  std::string dataset = "slow";
  std::size_t rows = 1000;
  std::size_t cols = 1000;
  std::uint64_t seed = default_seed();
  std::string out;
  std::string format;
};

int run_gen(const GenCommand& cmd) {
  const DatasetSpec ds = parse_dataset(cmd.dataset);
  if (!ds.synthetic()) throw ConfigError("gen: dataset must be slow, medium or fast");
  if (cmd.rows < 1 || cmd.cols < 1) throw ConfigError("gen: rows and cols must be >= 1");
  MatrixFormat fmt = format_from_path(cmd.out);
  if (cmd.format == "csv") fmt = MatrixFormat::csv;
  else if (cmd.format == "raw") fmt = MatrixFormat::raw;
  else if (!cmd.format.empty()) throw ConfigError("gen: format must be csv or raw");

  const DecayProfile profile = DecayProfile::make(*ds.decay, cmd.rows, cmd.cols, cmd.seed);
  const DenseMatrix A = gen_decay_matrix(profile);
  save_matrix(cmd.out, A, fmt);

  const auto sigma = profile.singular_values();
  const ValueRange vr = value_range(A);
  std::fprintf(stderr, "%s %zux%zu seed=%llu sigma_min/sigma_1=%.3g value_range=%.3g\n",
               std::string(name(*ds.decay)).c_str(), cmd.rows, cmd.cols,
               static_cast<unsigned long long>(cmd.seed), sigma.back() / sigma.front(), vr.ratio);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-precision interpolative decomposition benchmarks"};
  app.require_subcommand(1);

  SweepCommand rank{.app = app.add_subcommand("sweep-rank", "relative spectral error vs target rank"),
                    .experiment = Experiment::rank_sweep};
  SweepCommand cols{.app = app.add_subcommand("sweep-cols", "relative spectral error vs column dimension"),
                    .experiment = Experiment::coldim_sweep};
  SweepCommand rom{.app = app.add_subcommand("rom", "column-skeleton reduced-order model"),
                   .experiment = Experiment::rom};
  for (SweepCommand* c : {&rank, &cols, &rom}) add_sweep_options(*c);

  GenCommand gen;
  gen.app = app.add_subcommand("gen", "write a synthetic decay matrix");
  gen.app->add_option("--dataset", gen.dataset, "slow | medium | fast");
  gen.app->add_option("--rows", gen.rows, "row count");
  gen.app->add_option("--cols", gen.cols, "column count");
  gen.app->add_option("--seed", gen.seed, "seed (default $MPID_SEED or 1)");
  gen.app->add_option("--out", gen.out, "output path (.csv selects CSV, otherwise RAW)")->required();
  gen.app->add_option("--format", gen.format, "csv | raw (overrides the extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }

  try {
    if (gen.app->parsed()) return run_gen(gen);
    for (const SweepCommand* c : {&rank, &cols, &rom})
      if (c->app->parsed()) return run_sweep(*c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const IOError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return exit_io;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return exit_config;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_all_failed;
  }
  return exit_config;
}
