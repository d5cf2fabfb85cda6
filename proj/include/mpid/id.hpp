#pragma once
//
// Column interpolative decomposition A ~= A(:, I) P from a pivoted QR, in the
// three flavours compared throughout the toolkit:
//
//   Double    skeleton and coefficients from a double-precision QR
//   MixedLow  coefficients from a low-precision QR, skeleton taken from A_D
//   Low       coefficients from a low-precision QR, skeleton taken from A_L
//
// Reconstructions are always evaluated in double.
//

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/matrix.hpp"
#include "mpid/mgsqr.hpp"
#include "mpid/precision.hpp"

namespace mpid {

enum class Variant { Double, MixedLow, Low };
enum class SkeletonSource { double_matrix, low_matrix };

// Precision in which T = R11^+ R12 is formed.
enum class PinvPrecision { Double, Context };

struct IDApprox {
  std::vector<std::size_t> indices;  // skeleton columns, 0-based, length k
  DenseMatrix P;                     // k x n, P(:, indices) = I_k
  Variant variant = Variant::Double;
  PrecisionContext ctx;
  SkeletonSource skeleton_source = SkeletonSource::double_matrix;

  std::size_t rank() const noexcept { return indices.size(); }
};

struct IDOptions {
  std::optional<double> pinv_tol;  // relative to sigma_max(R11); default_pinv_tol() if unset
  PinvPrecision pinv_precision = PinvPrecision::Double;
};

inline std::string_view name(Variant v) noexcept {
  switch (v) {
    case Variant::Double: return "double";
    case Variant::MixedLow: return "mixed";
    case Variant::Low: return "low";
  }
  return "?";
}

// Truncation threshold for R11^+, relative to sigma_max(R11): max(k, n) times
// the unit round-off of the arithmetic that forms the pseudo-inverse.
inline double default_pinv_tol(std::size_t k, std::size_t n, const PrecisionContext& ctx,
                               PinvPrecision where = PinvPrecision::Double) {
  const double u = where == PinvPrecision::Double ? binary64.unit_roundoff()
                                                  : ctx.accumulation.unit_roundoff();
  return static_cast<double>(std::max(k, n)) * u;
}

// P = [I_k  R11^+ R12] Z^T.
inline DenseMatrix coefficient_matrix(const PivotedQR& qr, double pinv_tol,
                                      PinvPrecision where = PinvPrecision::Double) {
  if (pinv_tol < 0.0) throw DomainError("coefficient_matrix: pinv_tol must be >= 0");
  const std::size_t k = qr.k;
  if (k == 0 || qr.R.rows() != k) throw DimensionError("coefficient_matrix: empty factorization");
  const std::size_t n = qr.R.cols();
  if (qr.piv.size() != n) throw DimensionError("coefficient_matrix: pivot length mismatch");

  DenseMatrix R11(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) R11(i, j) = qr.R(i, j);
  const SVD svd = svd_small(R11);
  if (svd.S[0] == 0.0) throw DegenerateError("coefficient_matrix: R11 is zero");
  DenseMatrix pinv = pseudo_inverse(svd, pinv_tol);

  DenseMatrix P(k, n);
  for (std::size_t j = 0; j < k; ++j) P(j, qr.piv[j]) = 1.0;
  if (n == k) return P;

  if (where == PinvPrecision::Double) {
    for (std::size_t c = k; c < n; ++c) {
      auto out = P.col(qr.piv[c]);
      for (std::size_t l = 0; l < k; ++l) {
        const double r = qr.R(l, c);
        if (r == 0.0) continue;
        const auto pl = pinv.col(l);
        for (std::size_t i = 0; i < k; ++i) out[i] += pl[i] * r;
      }
    }
    return P;
  }

  // Context route: pinv stored in the working format, each entry of T an
  // accumulated dot product stored back.
  const PrecisionContext& ctx = qr.ctx;
  const DenseMatrix pinv_rows = transpose(round_matrix(pinv, ctx.storage));
  for (std::size_t c = k; c < n; ++c) {
    auto out = P.col(qr.piv[c]);
    const auto rc = qr.R.col(c);
    for (std::size_t i = 0; i < k; ++i) out[i] = ctx_store(dot_ctx(pinv_rows.col(i), rc, ctx), ctx);
  }
  return P;
}

// source(:, I) P evaluated in double.
inline DenseMatrix build_id(const DenseMatrix& source, const IDApprox& approx) {
  if (source.cols() != approx.P.cols())
    throw DimensionError("build_id: source column count does not match P");
  return matmul(select_columns(source, approx.indices), approx.P);
}

// Assembles an IDApprox from a factorization of the (possibly rounded) data.
inline IDApprox id_from_qr(const PivotedQR& qr, Variant variant, const IDOptions& opt = {}) {
  if (variant == Variant::Double && !qr.ctx.is_double())
    throw DomainError("id_from_qr: the Double variant requires a double-precision factorization");
  IDApprox out;
  const std::size_t n = qr.R.cols();
  const double tol = opt.pinv_tol.value_or(default_pinv_tol(qr.k, n, qr.ctx, opt.pinv_precision));
  out.P = coefficient_matrix(qr, tol, opt.pinv_precision);
  out.indices.assign(qr.piv.begin(), qr.piv.begin() + static_cast<std::ptrdiff_t>(qr.k));
  out.variant = variant;
  out.ctx = qr.ctx;
  out.skeleton_source =
      variant == Variant::Low ? SkeletonSource::low_matrix : SkeletonSource::double_matrix;
  return out;
}

// Full pipeline on double data A_D: round to the storage format, factor,
// form P, keep the first k pivots.
inline IDApprox id_pipeline(const DenseMatrix& A_D, std::size_t k, const PrecisionContext& ctx,
                            Variant variant, const IDOptions& opt = {}) {
  if (variant == Variant::Double && !ctx.is_double())
    throw DomainError("id_pipeline: the Double variant requires the Double context");
  const PivotedQR qr =
      ctx.is_double() ? mgsqr(A_D, k, ctx) : mgsqr(round_matrix(A_D, ctx.storage), k, ctx);
  return id_from_qr(qr, variant, opt);
}

// Reconstruction with the skeleton source the variant calls for.
inline DenseMatrix reconstruct(const DenseMatrix& A_D, const IDApprox& approx) {
  if (approx.skeleton_source == SkeletonSource::low_matrix)
    return build_id(round_matrix(A_D, approx.ctx.storage), approx);
  return build_id(A_D, approx);
}

// ||A - Ahat||_2 / ||A||_2 with both norms by power iteration in double.
inline double rel_spectral_error(const DenseMatrix& A, const DenseMatrix& Ahat,
                                 const SpectralNormOptions& opt = {}) {
  const double denom = spectral_norm(A, opt);
  if (denom == 0.0) throw DegenerateError("rel_spectral_error: reference matrix is zero");
  return spectral_norm(subtract(A, Ahat), opt) / denom;
}

struct LemmaBound {
  double p_norm_bound;
  double err_bound;
};

// Existence bounds for a rank-k column ID of an n-column matrix:
// ||P||_2 <= sqrt(1 + k(n-k)) and ||A - A(:,I)P||_2 <= sqrt(1 + k(n-k)) sigma_{k+1}.
inline LemmaBound lemma_bound(std::size_t k, std::size_t n, double sigma_k1) {
  if (k < 1 || k >= n) throw DomainError("lemma_bound: requires 1 <= k < n");
  if (sigma_k1 < 0.0) throw DomainError("lemma_bound: sigma_{k+1} must be nonnegative");
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n);
  const double p = std::sqrt(1.0 + kd * (nd - kd));
  return {p, p * sigma_k1};
}

}  // namespace mpid
