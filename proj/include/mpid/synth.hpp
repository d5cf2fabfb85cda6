#pragma once
//
// Synthetic test matrices with prescribed singular values sigma_i = i^-p.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "mpid/errors.hpp"
#include "mpid/matrix.hpp"
#include "mpid/random.hpp"

namespace mpid {

enum class Decay { Slow, Medium, Fast };

inline double decay_exponent(Decay d) noexcept {
  switch (d) {
    case Decay::Slow: return 1.0;
    case Decay::Medium: return 2.0;
    case Decay::Fast: return 4.0;
  }
  return 1.0;
}

inline std::string_view name(Decay d) noexcept {
  switch (d) {
    case Decay::Slow: return "slow";
    case Decay::Medium: return "medium";
    case Decay::Fast: return "fast";
  }
  return "?";
}

struct DecayProfile {
  Decay decay = Decay::Slow;
  double exponent = 1.0;
  std::size_t m = 1000;
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  static DecayProfile make(Decay d, std::size_t m, std::size_t n, std::uint64_t seed) {
    return {d, decay_exponent(d), m, n, seed};
  }

  std::vector<double> singular_values() const {
    std::vector<double> s(std::min(m, n));
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] = std::pow(static_cast<double>(i + 1), -exponent);
    return s;
  }
};

inline DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, Rng& rng) {
  DenseMatrix G(m, n);
  for (double& v : G.data()) v = rng.normal();
  return G;
}

// Q factor of a Gram-Schmidt QR with one reorthogonalization pass. R's
// diagonal is the column norm, hence positive, so Q of a Gaussian matrix is
// Haar distributed.
inline DenseMatrix orthonormal_factor(DenseMatrix G) {
  const std::size_t m = G.rows();
  const std::size_t n = G.cols();
  if (n > m) throw DimensionError("orthonormal_factor: more columns than rows");
  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    auto g = G.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t l = 0; l < j; ++l) {
        const auto q = G.col(l);
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += q[i] * g[i];
        h[l] = s;
      }
      for (std::size_t l = 0; l < j; ++l) {
        const auto q = G.col(l);
        const double s = h[l];
        for (std::size_t i = 0; i < m; ++i) g[i] -= s * q[i];
      }
    }
    double nrm = 0.0;
    for (double v : g) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw DegenerateError("orthonormal_factor: rank-deficient input");
    for (double& v : g) v /= nrm;
  }
  return G;
}

// A = U diag(sigma) V^T with U, V Haar-random orthonormal factors.
inline DenseMatrix gen_decay_matrix(const DecayProfile& profile) {
  if (profile.m < 1 || profile.n < 1) throw DimensionError("gen_decay_matrix: empty dimension");
  const std::size_t r = std::min(profile.m, profile.n);
  Rng rng(profile.seed);
  const DenseMatrix U = orthonormal_factor(gaussian_matrix(profile.m, r, rng));
  const DenseMatrix V = orthonormal_factor(gaussian_matrix(profile.n, r, rng));
  const std::vector<double> sigma = profile.singular_values();

  // A(:, j) = sum_l U(:, l) sigma_l V(j, l)
  DenseMatrix A(profile.m, profile.n);
  for (std::size_t j = 0; j < profile.n; ++j) {
    auto a = A.col(j);
    for (std::size_t l = 0; l < r; ++l) {
      const double c = sigma[l] * V(j, l);
      const auto u = U.col(l);
      for (std::size_t i = 0; i < profile.m; ++i) a[i] += u[i] * c;
    }
  }
  return A;
}

struct ValueRange {
  double ratio;        // max|a_ij| / min|a_ij|, +Inf if some entry is zero
  bool has_zero;
};

inline ValueRange value_range(const DenseMatrix& A) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double v : A.data()) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  if (lo == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {hi / lo, false};
}

inline DenseMatrix column_prefix(const DenseMatrix& A, std::size_t n_sub) {
  if (n_sub < 1 || n_sub > A.cols()) throw DimensionError("column_prefix: n_sub out of range");
  DenseMatrix S(A.rows(), n_sub);
  std::copy_n(A.data().begin(), A.rows() * n_sub, S.data().begin());
  return S;
}

}  // namespace mpid
