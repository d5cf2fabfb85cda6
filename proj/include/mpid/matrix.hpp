#pragma once
//
// Dense column-major matrix and the kernels the factorizations are built on:
// context-aware dot products and column norms, a power-iteration spectral
// norm, and a one-sided Jacobi SVD for small matrices.
//

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/precision.hpp"
#include "mpid/random.hpp"

namespace mpid {

class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw DimensionError("DenseMatrix: empty dimension");
  }

  // Row-wise literal, for tests and small examples.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw DimensionError("DenseMatrix: empty dimension");
    data_.resize(rows_ * cols_);
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("DenseMatrix: ragged initializer");
      std::size_t j = 0;
      for (double v : r) (*this)(i, j++) = v;
      ++i;
    }
  }

  static DenseMatrix identity(std::size_t n) { return identity(n, n); }

  static DenseMatrix identity(std::size_t m, std::size_t n) {
    DenseMatrix I(m, n);
    for (std::size_t i = 0; i < std::min(m, n); ++i) I(i, i) = 1.0;
    return I;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void swap_cols(std::size_t a, std::size_t b) noexcept {
    if (a == b) return;
    std::swap_ranges(col(a).begin(), col(a).end(), col(b).begin());
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// 0-based column permutation; perm[j] is the original index of the column now
// in position j.
using PermutationVector = std::vector<std::size_t>;

inline bool is_permutation_of_iota(std::span<const std::size_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

// ---------------------------------------------------------------------------
// elementary matrix algebra (native double)

inline DenseMatrix transpose(const DenseMatrix& A) {
  DenseMatrix T(A.cols(), A.rows());
  for (std::size_t j = 0; j < A.cols(); ++j)
    for (std::size_t i = 0; i < A.rows(); ++i) T(j, i) = A(i, j);
  return T;
}

inline DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw DimensionError("matmul: inner dimension mismatch");
  DenseMatrix C(A.rows(), B.cols());
  for (std::size_t j = 0; j < B.cols(); ++j) {
    auto c = C.col(j);
    for (std::size_t l = 0; l < A.cols(); ++l) {
      const double b = B(l, j);
      if (b == 0.0) continue;
      auto a = A.col(l);
      for (std::size_t i = 0; i < A.rows(); ++i) c[i] += a[i] * b;
    }
  }
  return C;
}

inline DenseMatrix subtract(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw DimensionError("subtract: shape mismatch");
  DenseMatrix C = A;
  auto c = C.data();
  auto b = B.data();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return C;
}

inline DenseMatrix scaled(const DenseMatrix& A, double s) {
  DenseMatrix C = A;
  for (double& v : C.data()) v *= s;
  return C;
}

inline double frobenius_norm(const DenseMatrix& A) {
  double scale = 0.0;
  for (double v : A.data()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : A.data()) s += (v / scale) * (v / scale);
  return scale * std::sqrt(s);
}

// columns of A in the listed order
inline DenseMatrix select_columns(const DenseMatrix& A, std::span<const std::size_t> idx) {
  DenseMatrix S(A.rows(), idx.size());
  for (std::size_t c = 0; c < idx.size(); ++c) {
    if (idx[c] >= A.cols()) throw DimensionError("select_columns: index out of range");
    std::ranges::copy(A.col(idx[c]), S.col(c).begin());
  }
  return S;
}

// Elementwise rounding into format f. Throws if any finite entry overflows.
inline DenseMatrix round_matrix(const DenseMatrix& A, const FloatFormat& f) {
  DenseMatrix L = A;
  for (double& v : L.data()) {
    const double r = round_scalar(v, f);
    if (std::isinf(r) && std::isfinite(v))
      throw OverflowError("round_matrix: entry exceeds the largest finite value of the format");
    v = r;
  }
  return L;
}

// ---------------------------------------------------------------------------
// context kernels

inline constexpr std::size_t dot_leaf_size = 8;

namespace detail {

template <bool Native>
double dot_tree(const double* x, const double* y, std::size_t n, const FloatFormat& acc) {
  if (n <= dot_leaf_size) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if constexpr (Native) {
        s += x[i] * y[i];
      } else {
        s = round_scalar(s + round_scalar(x[i] * y[i], acc), acc);
      }
    }
    return s;
  }
  const std::size_t h = n / 2;
  const double a = dot_tree<Native>(x, y, h, acc);
  const double b = dot_tree<Native>(x + h, y + h, n - h, acc);
  if constexpr (Native) {
    return a + b;
  } else {
    return round_scalar(a + b, acc);
  }
}

}  // namespace detail

// Pairwise dot product: the vector is halved recursively down to blocks of
// dot_leaf_size, which are summed left to right; every product and partial
// sum is rounded to the accumulation format. The tree depends only on the
// length, so results are reproducible. The result is not stored back.
inline double dot_ctx(std::span<const double> x, std::span<const double> y,
                      const PrecisionContext& ctx) {
  if (x.size() != y.size()) throw DimensionError("dot_ctx: length mismatch");
  if (ctx.accumulation.is_binary64())
    return detail::dot_tree<true>(x.data(), y.data(), x.size(), ctx.accumulation);
  return detail::dot_tree<false>(x.data(), y.data(), x.size(), ctx.accumulation);
}

inline double col_norm2_ctx(const DenseMatrix& A, std::size_t j, const PrecisionContext& ctx) {
  if (j >= A.cols()) throw DimensionError("col_norm2_ctx: column out of range");
  return ctx_op(Op::sqrt, dot_ctx(A.col(j), A.col(j), ctx), 0.0, ctx);
}

// ---------------------------------------------------------------------------
// spectral norm

struct SpectralNormOptions {
  double tol = 1e-10;
  int max_iter = 5000;
  std::uint64_t seed = 0x5eed;
};

// sigma_1(A) by power iteration on A^T A from a seeded Gaussian start. Stops
// when successive estimates of ||A v|| agree to tol (relative).
inline double spectral_norm(const DenseMatrix& A, const SpectralNormOptions& opt = {}) {
  if (!(opt.tol > 0.0)) throw DomainError("spectral_norm: tol must be positive");
  const std::size_t m = A.rows();
  const std::size_t n = A.cols();

  Rng rng(opt.seed);
  std::vector<double> v(n), w(m);
  for (double& x : v) x = rng.normal();

  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double t : x) s += t * t;
    s = std::sqrt(s);
    if (s > 0.0)
      for (double& t : x) t /= s;
    return s;
  };
  normalize(v);

  double est = 0.0;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.max_iter; ++it) {
    std::ranges::fill(w, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double vj = v[j];
      const auto a = A.col(j);
      for (std::size_t i = 0; i < m; ++i) w[i] += a[i] * vj;
    }
    double wn = 0.0;
    for (double t : w) wn += t * t;
    wn = std::sqrt(wn);
    if (wn == 0.0) return 0.0;

    for (std::size_t j = 0; j < n; ++j) {
      const auto a = A.col(j);
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) s += a[i] * w[i];
      v[j] = s;
    }
    normalize(v);

    change = std::abs(wn - est) / wn;
    est = wn;
    if (it > 0 && change < opt.tol) return est;
  }
  if (change > 100.0 * opt.tol)
    throw ConvergenceError("spectral_norm: power iteration did not converge");
  return est;
}

// ---------------------------------------------------------------------------
// small dense SVD

struct SVD {
  DenseMatrix U;          // m x r
  std::vector<double> S;  // r, nonincreasing
  DenseMatrix V;          // n x r
};

namespace detail {

// Completes the columns flagged in `missing` to an orthonormal set against the
// remaining columns, using standard basis vectors as candidates.
inline void complete_orthonormal(DenseMatrix& Q, const std::vector<bool>& missing) {
  const std::size_t m = Q.rows();
  std::size_t candidate = 0;
  for (std::size_t c = 0; c < Q.cols(); ++c) {
    if (!missing[c]) continue;
    while (candidate < m) {
      auto q = Q.col(c);
      std::ranges::fill(q, 0.0);
      q[candidate++] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t o = 0; o < Q.cols(); ++o) {
          if (o == c || (missing[o] && o > c)) continue;
          const auto p = Q.col(o);
          double d = 0.0;
          for (std::size_t i = 0; i < m; ++i) d += p[i] * q[i];
          for (std::size_t i = 0; i < m; ++i) q[i] -= d * p[i];
        }
      }
      double nrm = 0.0;
      for (double t : q) nrm += t * t;
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {
        for (double& t : q) t /= nrm;
        break;
      }
    }
  }
}

// One-sided Jacobi on the columns of W (m x n, m >= n).
inline SVD jacobi_tall(DenseMatrix W) {
  const std::size_t m = W.rows();
  const std::size_t n = W.cols();
  DenseMatrix V = DenseMatrix::identity(n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 30;

  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        auto wp = W.col(p);
        auto wq = W.col(q);
        double alpha = 0.0, beta = 0.0, g = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += wp[i] * wp[i];
          beta += wq[i] * wq[i];
          g += wp[i] * wq[i];
        }
        if (g == 0.0 || std::abs(g) <= eps * std::sqrt(alpha * beta)) continue;
        converged = false;

        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double a = wp[i], b = wq[i];
          wp[i] = c * a - s * b;
          wq[i] = s * a + c * b;
        }
        auto vp = V.col(p);
        auto vq = V.col(q);
        for (std::size_t i = 0; i < n; ++i) {
          const double a = vp[i], b = vq[i];
          vp[i] = c * a - s * b;
          vq[i] = s * a + c * b;
        }
      }
    }
  }
  if (!converged) throw ConvergenceError("svd_small: Jacobi sweeps did not converge");

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (double t : W.col(j)) s += t * t;
    norms[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });

  SVD out{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
  const double smax = norms[order[0]];
  const double negligible = static_cast<double>(std::max(m, n)) * eps * smax;
  std::vector<bool> missing(n, false);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t j = order[c];
    out.S[c] = norms[j];
    std::ranges::copy(V.col(j), out.V.col(c).begin());
    if (norms[j] == 0.0 || norms[j] <= negligible) {
      missing[c] = true;
    } else {
      auto u = out.U.col(c);
      auto w = W.col(j);
      for (std::size_t i = 0; i < m; ++i) u[i] = w[i] / norms[j];
    }
  }
  if (std::ranges::find(missing, true) != missing.end()) complete_orthonormal(out.U, missing);
  return out;
}

}  // namespace detail

// Thin SVD A = U diag(S) V^T of a small dense matrix (min(m, n) <= 256).
inline SVD svd_small(const DenseMatrix& A) {
  if (std::min(A.rows(), A.cols()) > 256)
    throw DimensionError("svd_small: matrix too large for the dense Jacobi kernel");
  for (double v : A.data())
    if (!std::isfinite(v)) throw DomainError("svd_small: non-finite entry");
  if (A.rows() >= A.cols()) return detail::jacobi_tall(A);
  SVD t = detail::jacobi_tall(transpose(A));
  return {std::move(t.V), std::move(t.S), std::move(t.U)};
}

// Moore-Penrose pseudo-inverse; singular values at or below
// rel_tol * sigma_max are treated as zero.
inline DenseMatrix pseudo_inverse(const SVD& svd, double rel_tol) {
  const std::size_t r = svd.S.size();
  const double cutoff = rel_tol * (r ? svd.S[0] : 0.0);
  DenseMatrix X(svd.V.rows(), svd.U.rows());
  for (std::size_t c = 0; c < r; ++c) {
    if (!(svd.S[c] > cutoff) || svd.S[c] == 0.0) continue;
    const double inv = 1.0 / svd.S[c];
    const auto v = svd.V.col(c);
    const auto u = svd.U.col(c);
    for (std::size_t j = 0; j < X.cols(); ++j) {
      const double uj = u[j] * inv;
      if (uj == 0.0) continue;
      auto x = X.col(j);
      for (std::size_t i = 0; i < X.rows(); ++i) x[i] += v[i] * uj;
    }
  }
  return X;
}

}  // namespace mpid
