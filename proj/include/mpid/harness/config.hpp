#pragma once
//
// Experiment configuration. Settings come from built-in defaults, then an
// optional `key = value` file, then command-line flags; every key is also a
// flag of the same name.
//

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/harness/io.hpp"
#include "mpid/id.hpp"
#include "mpid/precision.hpp"
#include "mpid/synth.hpp"

namespace mpid::harness {

enum class Experiment { rank_sweep, coldim_sweep, rom };
enum class Baseline { double_id, ground_truth };

inline std::string_view name(Experiment e) noexcept {
  switch (e) {
    case Experiment::rank_sweep: return "rank_sweep";
    case Experiment::coldim_sweep: return "coldim_sweep";
    case Experiment::rom: return "rom";
  }
  return "?";
}

struct VariantSpec {
  std::string label;  // double, single, half, mixed_single, mixed_half
  PrecisionKind precision = PrecisionKind::Double;
  Variant variant = Variant::Double;

  friend bool operator==(const VariantSpec&, const VariantSpec&) = default;
};

inline VariantSpec parse_variant(std::string_view s) {
  if (s == "double") return {"double", PrecisionKind::Double, Variant::Double};
  if (s == "single") return {"single", PrecisionKind::Single, Variant::Low};
  if (s == "half") return {"half", PrecisionKind::SimulatedHalf, Variant::Low};
  if (s == "mixed_single") return {"mixed_single", PrecisionKind::Single, Variant::MixedLow};
  if (s == "mixed_half") return {"mixed_half", PrecisionKind::SimulatedHalf, Variant::MixedLow};
  throw ConfigError("unknown variant '" + std::string(s) +
                    "' (expected double, single, half, mixed_single, mixed_half)");
}

struct DatasetSpec {
  std::optional<Decay> decay;  // synthetic when set
  std::string path;            // file otherwise

  bool synthetic() const noexcept { return decay.has_value(); }
  std::string label() const { return synthetic() ? std::string(name(*decay)) : "file:" + path; }
};

inline DatasetSpec parse_dataset(std::string_view s) {
  if (s == "slow") return {Decay::Slow, {}};
  if (s == "medium") return {Decay::Medium, {}};
  if (s == "fast") return {Decay::Fast, {}};
  if (s.starts_with("file:") && s.size() > 5) return {std::nullopt, std::string(s.substr(5))};
  throw ConfigError("unknown dataset '" + std::string(s) + "' (expected slow, medium, fast, file:PATH)");
}

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("MPID_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  return 1;
}

struct ExperimentConfig {
  Experiment experiment = Experiment::rank_sweep;
  DatasetSpec dataset{Decay::Slow, {}};
  std::vector<VariantSpec> variants;
  std::vector<std::size_t> k_list;
  std::vector<std::size_t> n_list;
  Baseline baseline = Baseline::double_id;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  PinvPrecision pinv_precision = PinvPrecision::Double;
  std::size_t rows = 1000;  // synthetic dimensions
  std::size_t cols = 1000;
  std::vector<std::size_t> held_out;  // rom, 0-based
  bool csv_header = false;            // file datasets
  std::string out;
  std::string svg;

  static ExperimentConfig defaults(Experiment e) {
    ExperimentConfig c;
    c.experiment = e;
    c.seed = default_seed();
    for (const char* v : {"double", "single", "half", "mixed_single", "mixed_half"})
      c.variants.push_back(parse_variant(v));
    switch (e) {
      case Experiment::rank_sweep:
        for (std::size_t k = 5; k <= 51; k += 2) c.k_list.push_back(k);
        break;
      case Experiment::coldim_sweep:
        c.k_list = {20};
        for (std::size_t n = 100; n <= 1000; n += 100) c.n_list.push_back(n);
        break;
      case Experiment::rom:
        c.k_list = {10, 20, 40};
        c.baseline = Baseline::ground_truth;
        break;
    }
    return c;
  }

  std::vector<std::uint64_t> seed_list() const {
    std::vector<std::uint64_t> s;
    for (std::size_t i = 0; i < seeds; ++i) s.push_back(seed + i);
    return s;
  }

  void validate() const {
    if (variants.empty()) throw ConfigError("no variants selected");
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (dataset.synthetic() && (rows < 1 || cols < 1)) throw ConfigError("rows and cols must be >= 1");
    for (std::size_t k : k_list)
      if (k < 1) throw ConfigError("ranks must be >= 1");
    switch (experiment) {
      case Experiment::rank_sweep:
        if (k_list.empty()) throw ConfigError("sweep-rank requires a rank list (--k)");
        break;
      case Experiment::coldim_sweep:
        if (n_list.empty()) throw ConfigError("sweep-cols requires a column-dimension list (--n)");
        if (k_list.size() != 1) throw ConfigError("sweep-cols requires exactly one rank (--k)");
        for (std::size_t n : n_list)
          if (n < k_list.front()) throw ConfigError("sweep-cols: every n must be >= k");
        break;
      case Experiment::rom:
        if (k_list.empty()) throw ConfigError("rom requires a rank list (--k)");
        if (dataset.synthetic() && held_out.empty())
          throw ConfigError("rom on a synthetic dataset requires held-out columns (--columns)");
        break;
    }
  }
};

namespace detail {

inline std::size_t parse_size(std::string_view s, std::string_view key) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("invalid integer '" + std::string(s) + "' for " + std::string(key));
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t c = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, c == s.npos ? s.npos : c - pos)));
    if (c == s.npos) break;
    pos = c + 1;
  }
  return out;
}

inline bool parse_bool(std::string_view s, std::string_view key) {
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(s) + "' for " + std::string(key));
}

}  // namespace detail

// "5,7,9" or "start:stop[:step]" (inclusive), or a mix: "5:11:2,40".
inline std::vector<std::size_t> parse_index_list(std::string_view s, std::string_view key) {
  std::vector<std::size_t> out;
  for (std::string_view item : detail::split(s, ',')) {
    if (item.empty()) throw ConfigError("empty entry in list for " + std::string(key));
    const auto parts = detail::split(item, ':');
    if (parts.size() == 1) {
      out.push_back(detail::parse_size(parts[0], key));
      continue;
    }
    if (parts.size() > 3) throw ConfigError("bad range '" + std::string(item) + "' for " + std::string(key));
    const std::size_t lo = detail::parse_size(parts[0], key);
    const std::size_t hi = detail::parse_size(parts[1], key);
    const std::size_t step = parts.size() == 3 ? detail::parse_size(parts[2], key) : 1;
    if (step == 0 || hi < lo) throw ConfigError("bad range '" + std::string(item) + "' for " + std::string(key));
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
  }
  return out;
}

// Applies one setting; shared by the config-file reader and the CLI.
inline void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "dataset") {
    cfg.dataset = parse_dataset(value);
  } else if (key == "variants") {
    cfg.variants.clear();
    for (std::string_view v : detail::split(value, ',')) cfg.variants.push_back(parse_variant(v));
  } else if (key == "k") {
    cfg.k_list = parse_index_list(value, key);
  } else if (key == "n") {
    cfg.n_list = parse_index_list(value, key);
  } else if (key == "baseline") {
    if (value == "double") cfg.baseline = Baseline::double_id;
    else if (value == "truth") cfg.baseline = Baseline::ground_truth;
    else throw ConfigError("baseline must be 'double' or 'truth'");
  } else if (key == "seed") {
    cfg.seed = detail::parse_size(value, key);
  } else if (key == "seeds") {
    cfg.seeds = detail::parse_size(value, key);
  } else if (key == "pinv-precision") {
    if (value == "double") cfg.pinv_precision = PinvPrecision::Double;
    else if (value == "ctx") cfg.pinv_precision = PinvPrecision::Context;
    else throw ConfigError("pinv-precision must be 'double' or 'ctx'");
  } else if (key == "rows") {
    cfg.rows = detail::parse_size(value, key);
  } else if (key == "cols") {
    cfg.cols = detail::parse_size(value, key);
  } else if (key == "columns") {
    cfg.held_out.clear();
    for (std::size_t c : parse_index_list(value, key)) {
      if (c < 1) throw ConfigError("columns are 1-based");
      cfg.held_out.push_back(c - 1);
    }
  } else if (key == "header") {
    cfg.csv_header = detail::parse_bool(value, key);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "svg") {
    cfg.svg = std::string(value);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

// `key = value` lines, '#' starts a comment.
inline void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::size_t line_no = 0;
  for (std::string_view line : detail::split(text, '\n')) {
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == line.npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = detail::trim(line.substr(0, eq));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    try {
      apply_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

}  // namespace mpid::harness
