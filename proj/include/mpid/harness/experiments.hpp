#pragma once
//
// Rank sweeps, column-dimension sweeps and the column-skeleton reduced-order
// model. Each (variant, k, n, seed) cell yields one ResultRow per baseline; a
// factorization that underflows or a rounding that overflows is recorded in
// the row's status and the sweep carries on.
//

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/harness/config.hpp"
#include "mpid/harness/io.hpp"
#include "mpid/id.hpp"
#include "mpid/matrix.hpp"
#include "mpid/mgsqr.hpp"
#include "mpid/synth.hpp"

namespace mpid::harness {

enum class Status { ok, underflow, overflow };

inline std::string_view name(Status s) noexcept {
  switch (s) {
    case Status::ok: return "ok";
    case Status::underflow: return "underflow";
    case Status::overflow: return "overflow";
  }
  return "?";
}

inline std::string_view error_kind(Baseline b) noexcept {
  return b == Baseline::double_id ? "rel_spectral_vs_double" : "rel_spectral_vs_truth";
}

struct ResultRow {
  std::string experiment;
  std::string dataset;
  std::string variant;
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string error_kind;
  double error_value = std::numeric_limits<double>::quiet_NaN();
  Status status = Status::ok;

  bool ok() const noexcept { return status == Status::ok; }
};

// Supplies the data matrix for a seed; lets callers share generated matrices.
using MatrixSource = std::function<DenseMatrix(std::uint64_t seed)>;

inline DenseMatrix load_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.dataset.synthetic())
    return gen_decay_matrix(DecayProfile::make(*cfg.dataset.decay, cfg.rows, cfg.cols, seed));
  return load_matrix(cfg.dataset.path, format_from_path(cfg.dataset.path), cfg.csv_header);
}

inline MatrixSource default_source(const ExperimentConfig& cfg) {
  return [cfg](std::uint64_t seed) { return load_dataset(cfg, seed); };
}

// Orders rows by (dataset, variant, k, n, seed); ties keep emission order.
inline void sort_rows(std::vector<ResultRow>& rows) {
  std::ranges::stable_sort(rows, [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.dataset, a.variant, a.k, a.n, a.seed) <
           std::tie(b.dataset, b.variant, b.k, b.n, b.seed);
  });
}

namespace detail {

// One factorization per working precision, run to the largest rank needed.
struct PrecisionRun {
  PrecisionContext ctx;
  std::optional<DenseMatrix> rounded;  // A_L; empty for Double
  std::optional<PartialQR> run;
  bool overflowed = false;

  const DenseMatrix& data(const DenseMatrix& A) const { return rounded ? *rounded : A; }
  std::size_t completed() const { return run ? run->qr.k : 0; }
};

class Factorizations {
 public:
  Factorizations(const DenseMatrix& A, std::size_t k_max) : A_(A), k_max_(k_max) {}

  const PrecisionRun& get(PrecisionKind kind) {
    auto it = runs_.find(kind);
    if (it != runs_.end()) return it->second;
    PrecisionRun r;
    r.ctx = PrecisionContext::of(kind);
    try {
      if (!r.ctx.is_double()) r.rounded = round_matrix(A_, r.ctx.storage);
      r.run = mgsqr_until(r.data(A_), k_max_, r.ctx);
    } catch (const OverflowError&) {
      r.overflowed = true;
    }
    return runs_.emplace(kind, std::move(r)).first->second;
  }

 private:
  const DenseMatrix& A_;
  std::size_t k_max_;
  std::map<PrecisionKind, PrecisionRun> runs_;
};

inline void check_ranks(const DenseMatrix& A, std::span<const std::size_t> k_list) {
  const std::size_t limit = std::min(A.rows(), A.cols());
  for (std::size_t k : k_list)
    if (k < 1 || k > limit)
      throw ConfigError("rank " + std::to_string(k) + " outside 1.." + std::to_string(limit) +
                        " for a " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + " matrix");
}

inline SpectralNormOptions norm_options(std::uint64_t seed) {
  SpectralNormOptions o;
  o.seed = 0x9e3779b97f4a7c15ull ^ seed;
  return o;
}

// Spectral-error cells for every (k, variant, baseline) on one matrix.
inline std::vector<ResultRow> spectral_cells(const DenseMatrix& A, std::span<const std::size_t> k_list,
                                             const ExperimentConfig& cfg,
                                             std::span<const Baseline> baselines,
                                             std::uint64_t seed, std::string_view experiment) {
  check_ranks(A, k_list);
  const std::size_t k_max = *std::ranges::max_element(k_list);
  Factorizations fac(A, k_max);
  const IDOptions opt{std::nullopt, cfg.pinv_precision};
  const SpectralNormOptions nopt = norm_options(seed);
  const bool want_double = std::ranges::find(baselines, Baseline::double_id) != baselines.end();
  const bool want_truth = std::ranges::find(baselines, Baseline::ground_truth) != baselines.end();
  const double truth_norm = want_truth ? spectral_norm(A, nopt) : 0.0;
  if (want_truth && truth_norm == 0.0) throw DegenerateError("data matrix is zero");

  std::vector<ResultRow> rows;
  for (std::size_t k : k_list) {
    std::optional<DenseMatrix> Ad;
    double Ad_norm = 0.0;
    if (want_double) {
      const PrecisionRun& d = fac.get(PrecisionKind::Double);
      if (d.completed() >= k) {
        Ad = build_id(A, id_from_qr(leading(d.run->qr, k), Variant::Double, opt));
        Ad_norm = spectral_norm(*Ad, nopt);
      }
    }

    for (const VariantSpec& vs : cfg.variants) {
      const PrecisionRun& pr = fac.get(vs.precision);
      std::optional<DenseMatrix> approx;
      Status status = Status::ok;
      if (pr.overflowed) {
        status = Status::overflow;
      } else if (pr.completed() < k) {
        status = Status::underflow;
      } else if (vs.variant == Variant::Double && Ad) {
        approx = *Ad;
      } else {
        const IDApprox id = id_from_qr(leading(pr.run->qr, k), vs.variant, opt);
        approx = build_id(vs.variant == Variant::Low ? pr.data(A) : A, id);
      }

      for (Baseline b : baselines) {
        ResultRow row{std::string(experiment), cfg.dataset.label(), vs.label, k, A.cols(), seed,
                      std::string(error_kind(b))};
        row.status = status;
        if (status == Status::ok) {
          if (b == Baseline::ground_truth) {
            row.error_value = spectral_norm(subtract(A, *approx), nopt) / truth_norm;
          } else if (!Ad) {
            row.status = Status::underflow;  // no double reference at this rank
          } else if (Ad_norm == 0.0) {
            throw DegenerateError("double-precision ID is zero");
          } else {
            row.error_value = spectral_norm(subtract(*Ad, *approx), nopt) / Ad_norm;
          }
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace detail

inline std::vector<ResultRow> run_rank_sweep(const ExperimentConfig& cfg,
                                             std::span<const Baseline> baselines,
                                             const MatrixSource& source) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : cfg.seed_list()) {
    const DenseMatrix A = source(seed);
    auto cells = detail::spectral_cells(A, cfg.k_list, cfg, baselines, seed, "rank_sweep");
    rows.insert(rows.end(), std::make_move_iterator(cells.begin()), std::make_move_iterator(cells.end()));
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<ResultRow> run_rank_sweep(const ExperimentConfig& cfg) {
  const Baseline b[] = {cfg.baseline};
  return run_rank_sweep(cfg, b, default_source(cfg));
}

inline std::vector<ResultRow> run_coldim_sweep(const ExperimentConfig& cfg,
                                               std::span<const Baseline> baselines,
                                               const MatrixSource& source) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : cfg.seed_list()) {
    const DenseMatrix A = source(seed);
    for (std::size_t n : cfg.n_list) {
      if (n > A.cols())
        throw ConfigError("column dimension " + std::to_string(n) + " exceeds the dataset's " +
                          std::to_string(A.cols()) + " columns");
      const DenseMatrix An = column_prefix(A, n);
      auto cells = detail::spectral_cells(An, cfg.k_list, cfg, baselines, seed, "coldim_sweep");
      rows.insert(rows.end(), std::make_move_iterator(cells.begin()), std::make_move_iterator(cells.end()));
    }
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<ResultRow> run_coldim_sweep(const ExperimentConfig& cfg) {
  const Baseline b[] = {cfg.baseline};
  return run_coldim_sweep(cfg, b, default_source(cfg));
}

// Reduced-order model: rows of A are time steps, columns are particles. For
// every variant and rank, each held-out column j gets
//   mse = ||A(:, j) - Ahat(:, j)||^2 / m      (error_kind "mse_column:<j+1>")
// and the mean over all non-skeleton columns is reported as "mse_mean".
inline std::vector<ResultRow> run_rom(const ExperimentConfig& cfg, const MatrixSource& source) {
  cfg.validate();
  std::vector<ResultRow> rows;
  for (std::uint64_t seed : cfg.seed_list()) {
    const DenseMatrix A = source(seed);
    for (std::size_t j : cfg.held_out)
      if (j >= A.cols())
        throw DimensionError("held-out column " + std::to_string(j + 1) + " exceeds the matrix's " +
                             std::to_string(A.cols()) + " columns");
    detail::check_ranks(A, cfg.k_list);
    detail::Factorizations fac(A, *std::ranges::max_element(cfg.k_list));
    const IDOptions opt{std::nullopt, cfg.pinv_precision};
    const double m = static_cast<double>(A.rows());

    for (std::size_t k : cfg.k_list) {
      for (const VariantSpec& vs : cfg.variants) {
        const detail::PrecisionRun& pr = fac.get(vs.precision);
        auto make_row = [&](std::string kind) {
          return ResultRow{"rom", cfg.dataset.label(), vs.label, k, A.cols(), seed, std::move(kind)};
        };
        Status status = Status::ok;
        if (pr.overflowed) status = Status::overflow;
        else if (pr.completed() < k) status = Status::underflow;

        if (status != Status::ok) {
          for (std::size_t j : cfg.held_out) {
            rows.push_back(make_row("mse_column:" + std::to_string(j + 1)));
            rows.back().status = status;
          }
          rows.push_back(make_row("mse_mean"));
          rows.back().status = status;
          continue;
        }

        const IDApprox id = id_from_qr(leading(pr.run->qr, k), vs.variant, opt);
        const DenseMatrix Ahat = build_id(vs.variant == Variant::Low ? pr.data(A) : A, id);
        auto column_mse = [&](std::size_t j) {
          const auto a = A.col(j);
          const auto h = Ahat.col(j);
          double s = 0.0;
          for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - h[i]) * (a[i] - h[i]);
          return s / m;
        };

        for (std::size_t j : cfg.held_out) {
          rows.push_back(make_row("mse_column:" + std::to_string(j + 1)));
          rows.back().error_value = column_mse(j);
        }
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < A.cols(); ++j) {
          if (std::ranges::find(id.indices, j) != id.indices.end()) continue;
          total += column_mse(j);
          ++count;
        }
        rows.push_back(make_row("mse_mean"));
        rows.back().error_value = count ? total / static_cast<double>(count) : 0.0;
      }
    }
  }
  sort_rows(rows);
  return rows;
}

inline std::vector<ResultRow> run_rom(const ExperimentConfig& cfg) {
  return run_rom(cfg, default_source(cfg));
}

inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::rank_sweep: return run_rank_sweep(cfg);
    case Experiment::coldim_sweep: return run_coldim_sweep(cfg);
    case Experiment::rom: return run_rom(cfg);
  }
  return {};
}

}  // namespace mpid::harness
