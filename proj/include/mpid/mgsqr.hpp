#pragma once
//
// Rank-k column-pivoted QR by modified Gram-Schmidt, every operation rounded
// through a PrecisionContext.
//

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>

#include "mpid/errors.hpp"
#include "mpid/matrix.hpp"
#include "mpid/precision.hpp"

namespace mpid {

struct PivotedQR {
  DenseMatrix Q;          // m x k
  DenseMatrix R;          // k x n, columns in pivoted order
  PermutationVector piv;  // A(:, piv) = A Z
  std::size_t k = 0;
  PrecisionContext ctx;
};

// Result of running the factorization as far as the working format allows.
struct PartialQR {
  PivotedQR qr;                  // qr.k = completed steps
  bool underflowed = false;
  std::size_t failed_step = 0;   // 0-based step that underflowed, if any
};

namespace detail {

inline void check_rank(const DenseMatrix& A, std::size_t k) {
  if (k < 1 || k > std::min(A.rows(), A.cols()))
    throw DimensionError("mgsqr: target rank must satisfy 1 <= k <= min(m, n), got k = " +
                         std::to_string(k));
}

inline PivotedQR truncate_steps(const DenseMatrix& Qfull, const DenseMatrix& Rfull,
                                const PermutationVector& piv, std::size_t steps,
                                const PrecisionContext& ctx) {
  PivotedQR out;
  out.ctx = ctx;
  out.piv = piv;
  out.k = steps;
  if (steps == 0) return out;
  out.Q = DenseMatrix(Qfull.rows(), steps);
  for (std::size_t j = 0; j < steps; ++j) std::ranges::copy(Qfull.col(j), out.Q.col(j).begin());
  out.R = DenseMatrix(steps, Rfull.cols());
  for (std::size_t j = 0; j < Rfull.cols(); ++j)
    for (std::size_t i = 0; i < steps; ++i) out.R(i, j) = Rfull(i, j);
  return out;
}

}  // namespace detail

// Runs up to k_max pivoted MGS steps and stops early, without throwing, at
// the first step whose pivot norm underflows. Steps 1..j of a run do not
// depend on k_max, so a single run serves every rank up to qr.k.
inline PartialQR mgsqr_until(const DenseMatrix& A, std::size_t k_max, const PrecisionContext& ctx) {
  detail::check_rank(A, k_max);
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();
  const FloatFormat& acc = ctx.accumulation;
  const FloatFormat& st = ctx.storage;
  const double tiny = acc.min_normal();

  DenseMatrix W = A;
  DenseMatrix Q(m, k_max);
  DenseMatrix R(k_max, n);
  PermutationVector piv(n);
  std::iota(piv.begin(), piv.end(), std::size_t{0});

  PartialQR out;
  std::vector<double> norms(n);
  std::size_t j = 0;
  for (; j < k_max; ++j) {
    // (a) trailing column norms, recomputed every step
    for (std::size_t i = j; i < n; ++i) norms[i] = col_norm2_ctx(W, i, ctx);

    // (b) pivot: largest norm, lowest index on ties
    std::size_t p = j;
    for (std::size_t i = j + 1; i < n; ++i)
      if (norms[i] > norms[p]) p = i;
    if (p != j) {
      W.swap_cols(j, p);
      std::swap(piv[j], piv[p]);
      std::swap(norms[j], norms[p]);
      for (std::size_t r = 0; r < j; ++r) std::swap(R(r, j), R(r, p));
    }

    // (c) r_jj, with underflow detection in the working formats
    const double rjj = round_scalar(norms[j], st);
    if (!(rjj > 0.0) || !(rjj * rjj >= tiny) || !std::isfinite(rjj)) {
      out.underflowed = true;
      out.failed_step = j;
      break;
    }
    R(j, j) = rjj;

    // (d) q_j
    auto q = Q.col(j);
    const auto w = W.col(j);
    for (std::size_t i = 0; i < m; ++i) q[i] = round_scalar(round_scalar(w[i] / rjj, acc), st);

    // (e) MGS update of the trailing columns
    for (std::size_t c = j + 1; c < n; ++c) {
      auto wc = W.col(c);
      const double rjc = round_scalar(dot_ctx(q, wc, ctx), st);
      R(j, c) = rjc;
      if (acc.is_binary64() && st.is_binary64()) {
        for (std::size_t i = 0; i < m; ++i) wc[i] = wc[i] - rjc * q[i];
      } else {
        for (std::size_t i = 0; i < m; ++i)
          wc[i] = round_scalar(round_scalar(wc[i] - round_scalar(rjc * q[i], acc), acc), st);
      }
    }
  }

  out.qr = detail::truncate_steps(Q, R, piv, j, ctx);
  return out;
}

// Rank-k pivoted QR: A(:, piv) ~= Q R. Throws UnderflowError when a pivot
// norm vanishes in the working formats before k steps complete.
inline PivotedQR mgsqr(const DenseMatrix& A, std::size_t k, const PrecisionContext& ctx) {
  PartialQR run = mgsqr_until(A, k, ctx);
  if (run.underflowed)
    throw UnderflowError("mgsqr: pivot norm underflow at step " + std::to_string(run.failed_step + 1),
                         run.failed_step, std::move(run.qr.piv));
  return std::move(run.qr);
}

// The rank-k factorization contained in a longer run.
inline PivotedQR leading(const PivotedQR& qr, std::size_t k) {
  if (k < 1 || k > qr.k) throw DimensionError("leading: rank exceeds completed steps");
  return detail::truncate_steps(qr.Q, qr.R, qr.piv, k, qr.ctx);
}

// ||Q^T Q - I||_F in double.
inline double check_orthogonality(const PivotedQR& qr) {
  const DenseMatrix G = matmul(transpose(qr.Q), qr.Q);
  DenseMatrix D = subtract(G, DenseMatrix::identity(G.rows()));
  return frobenius_norm(D);
}

}  // namespace mpid
