#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "mpid/id.hpp"
#include "mpid/synth.hpp"
#include "oracles.hpp"

using namespace mpid;

namespace {

const auto D = PrecisionContext::double_precision();
const auto S = PrecisionContext::single_precision();
const auto H = PrecisionContext::simulated_half();

PivotedQR make_qr(DenseMatrix R, PermutationVector piv) {
  PivotedQR qr;
  qr.k = R.rows();
  qr.R = std::move(R);
  qr.Q = DenseMatrix::identity(qr.k);
  qr.piv = std::move(piv);
  qr.ctx = D;
  return qr;
}

DenseMatrix rank_k(std::size_t m, std::size_t n, std::size_t k, std::uint64_t seed) {
  return matmul(oracle::random_matrix(m, k, seed), oracle::random_matrix(k, n, seed + 1000));
}

DenseMatrix outer(const std::vector<double>& x, const std::vector<double>& y) {
  DenseMatrix A(x.size(), y.size());
  for (std::size_t j = 0; j < y.size(); ++j)
    for (std::size_t i = 0; i < x.size(); ++i) A(i, j) = x[i] * y[j];
  return A;
}

const DenseMatrix& dataset(Decay d) {
  static std::map<Decay, DenseMatrix> cache;
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, gen_decay_matrix(DecayProfile::make(d, 1000, 1000, 1))).first;
  return it->second;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

TEST(CoefficientMatrix, Examples) {
  EXPECT_EQ(coefficient_matrix(make_qr(DenseMatrix{{2, 1}}, {0, 1}), 0.0), (DenseMatrix{{1, 0.5}}));

  const DenseMatrix P = coefficient_matrix(make_qr(DenseMatrix{{1, 0, 1}, {0, 0, 1}}, {0, 1, 2}), 1e-12);
  EXPECT_EQ(P, (DenseMatrix{{1, 0, 1}, {0, 1, 0}}));

  const DenseMatrix P2 = coefficient_matrix(make_qr(DenseMatrix{{5, 1.4}}, {0, 1}), 0.0);
  EXPECT_EQ(P2(0, 0), 1.0);
  EXPECT_NEAR(P2(0, 1), 0.28, 1e-16);
}

TEST(CoefficientMatrix, HandPipeline) {
  const IDApprox id = id_pipeline(DenseMatrix{{3, 1}, {4, 1}}, 1, D, Variant::Double);
  EXPECT_EQ(id.indices, (std::vector<std::size_t>{0}));
  EXPECT_NEAR(id.P(0, 1), 0.28, 1e-15);
}

TEST(CoefficientMatrix, PermutedColumnsLandAtOriginalIndices) {
  // piv = [2, 0, 1]: skeleton is column 2
  const DenseMatrix P = coefficient_matrix(make_qr(DenseMatrix{{4, 2, 1}}, {2, 0, 1}), 0.0);
  EXPECT_EQ(P, (DenseMatrix{{0.5, 0.25, 1}}));
}

TEST(CoefficientMatrix, Errors) {
  EXPECT_THROW(coefficient_matrix(make_qr(DenseMatrix{{0, 1}}, {0, 1}), 0.0), DegenerateError);
  EXPECT_THROW(coefficient_matrix(make_qr(DenseMatrix{{2, 1}}, {0, 1}), -1.0), DomainError);
}

TEST(CoefficientMatrix, SkeletonBlockIsIdentity) {
  const DenseMatrix A = oracle::random_matrix(60, 40, 5);
  for (const auto& ctx : {D, S, H}) {
    const IDApprox id =
        id_pipeline(A, 12, ctx, ctx.is_double() ? Variant::Double : Variant::MixedLow);
    ASSERT_EQ(id.rank(), 12u);
    const DenseMatrix block = select_columns(id.P, id.indices);
    EXPECT_EQ(block, DenseMatrix::identity(12)) << name(ctx.kind);
  }
}

TEST(CoefficientMatrix, ContextRouteIsCloseToDoubleRoute) {
  const DenseMatrix A = round_matrix(oracle::random_matrix(80, 50, 8), binary32);
  const PivotedQR qr = mgsqr(A, 10, S);
  const DenseMatrix Pd = coefficient_matrix(qr, 1e-12, PinvPrecision::Double);
  const DenseMatrix Pc = coefficient_matrix(qr, 1e-6, PinvPrecision::Context);
  for (double v : Pc.data()) EXPECT_EQ(v, round_scalar(v, binary32));
  EXPECT_LE(frobenius_norm(subtract(Pd, Pc)), 1e-4 * frobenius_norm(Pd));
}

TEST(DefaultPinvTol, ScalesWithPrecision) {
  EXPECT_EQ(default_pinv_tol(20, 1000, S), 1000 * binary64.unit_roundoff());
  EXPECT_EQ(default_pinv_tol(20, 1000, S, PinvPrecision::Context), 1000 * binary32.unit_roundoff());
  EXPECT_EQ(default_pinv_tol(20, 1000, H, PinvPrecision::Context), 1000 * binary32.unit_roundoff());
}

TEST(BuildId, DuplicateColumnReproducedExactly) {
  Rng rng(3);
  DenseMatrix A(6, 3);
  for (std::size_t i = 0; i < 6; ++i) {
    A(i, 0) = rng.normal();
    A(i, 1) = A(i, 0);
    A(i, 2) = rng.normal();
  }
  const IDApprox id = id_pipeline(A, 2, D, Variant::Double);
  EXPECT_LE(frobenius_norm(subtract(A, build_id(A, id))), 1e-14 * frobenius_norm(A));
}

TEST(BuildId, IdentityPipeline) {
  const DenseMatrix I = DenseMatrix::identity(4);
  const IDApprox id = id_pipeline(I, 4, D, Variant::Double);
  EXPECT_EQ(id.indices, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(id.P, I);
  EXPECT_EQ(build_id(I, id), I);
}

TEST(BuildId, SkeletonColumnsBitExact) {
  const DenseMatrix A = oracle::random_matrix(70, 45, 21);
  for (const auto& ctx : {S, H}) {
    const DenseMatrix AL = round_matrix(A, ctx.storage);
    const IDApprox mixed = id_pipeline(A, 15, ctx, Variant::MixedLow);
    const IDApprox low = id_pipeline(A, 15, ctx, Variant::Low);
    EXPECT_EQ(mixed.skeleton_source, SkeletonSource::double_matrix);
    EXPECT_EQ(low.skeleton_source, SkeletonSource::low_matrix);
    const DenseMatrix M = reconstruct(A, mixed);
    const DenseMatrix L = reconstruct(A, low);
    for (std::size_t j : mixed.indices) {
      EXPECT_TRUE(std::ranges::equal(M.col(j), A.col(j))) << name(ctx.kind) << " col " << j;
      EXPECT_TRUE(std::ranges::equal(L.col(j), AL.col(j))) << name(ctx.kind) << " col " << j;
    }
  }
  const IDApprox dbl = id_pipeline(A, 15, D, Variant::Double);
  const DenseMatrix Ad = reconstruct(A, dbl);
  for (std::size_t j : dbl.indices) EXPECT_TRUE(std::ranges::equal(Ad.col(j), A.col(j)));
}

TEST(BuildId, DimensionMismatch) {
  const IDApprox id = id_pipeline(oracle::random_matrix(10, 8, 1), 3, D, Variant::Double);
  EXPECT_THROW(build_id(oracle::random_matrix(10, 7, 1), id), DimensionError);
}

TEST(IdPipeline, VariantContracts) {
  const DenseMatrix A = oracle::random_matrix(10, 8, 1);
  EXPECT_THROW(id_pipeline(A, 3, S, Variant::Double), DomainError);
  EXPECT_THROW(id_pipeline(A, 9, D, Variant::Double), DimensionError);
  DenseMatrix big = A;
  big(0, 0) = 1e6;
  EXPECT_THROW(id_pipeline(big, 3, H, Variant::MixedLow), OverflowError);
  EXPECT_THROW(id_pipeline(DenseMatrix(6, 5, 1e-20), 2, H, Variant::Low), UnderflowError);
}

TEST(IdPipeline, ExactRankRecovery) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    for (std::size_t k : {1u, 5u, 17u}) {
      const DenseMatrix A = rank_k(80, 60, k, seed);
      const IDApprox id = id_pipeline(A, k, D, Variant::Double);
      EXPECT_LE(frobenius_norm(subtract(A, build_id(A, id))), 1e-12 * frobenius_norm(A))
          << "seed " << seed << " k " << k;
    }
  }
}

TEST(IdPipeline, RankOneCeilings) {
  // measured maxima over these seeds: single 9.9e-8, half 6.8e-4
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    std::vector<double> x(50), y(40);
    for (double& v : x) v = rng.normal();
    for (double& v : y) v = rng.normal();
    const DenseMatrix A = outer(x, y);
    for (Variant v : {Variant::MixedLow, Variant::Low}) {
      const double es = rel_spectral_error(A, reconstruct(A, id_pipeline(A, 1, S, v)));
      const double eh = rel_spectral_error(A, reconstruct(A, id_pipeline(A, 1, H, v)));
      const std::string tag = std::string(name(v)) + "_seed" + std::to_string(seed);
      RecordProperty("single_" + tag, sci(es));
      RecordProperty("half_" + tag, sci(eh));
      EXPECT_LE(es, 1e-6) << "seed " << seed;
      EXPECT_LE(eh, 1e-2) << "seed " << seed;
    }
  }
}

TEST(RelSpectralError, Examples) {
  const DenseMatrix A = oracle::random_matrix(20, 10, 2);
  EXPECT_LE(rel_spectral_error(A, A), 1e-10);
  EXPECT_NEAR(rel_spectral_error(DenseMatrix{{2, 0}, {0, 1}}, DenseMatrix{{2, 0}, {0, 0}}), 0.5, 1e-10);
  EXPECT_THROW(rel_spectral_error(DenseMatrix(3, 3), A), DegenerateError);
}

TEST(RelSpectralError, EckartYoungOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const DenseMatrix A = oracle::random_matrix(12, 9, seed);
    const auto sv = oracle::singular_values_via_gram(A);
    const SVD s = svd_small(A);
    for (std::size_t k : {1u, 3u, 6u}) {
      DenseMatrix Ak(A.rows(), A.cols());
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t j = 0; j < A.cols(); ++j)
          for (std::size_t i = 0; i < A.rows(); ++i) Ak(i, j) += s.U(i, r) * s.S[r] * s.V(j, r);
      EXPECT_NEAR(rel_spectral_error(A, Ak), sv[k] / sv[0], 1e-8) << "seed " << seed << " k " << k;
    }
  }
}

TEST(LemmaBound, Examples) {
  const LemmaBound b = lemma_bound(20, 1000, 1.0 / 21);
  EXPECT_EQ(b.p_norm_bound, std::sqrt(19601.0));
  EXPECT_NEAR(b.p_norm_bound, 140.0036, 5e-5);
  EXPECT_NEAR(b.err_bound, 6.6668, 5e-5);
  EXPECT_EQ(lemma_bound(20, 1000, 0.0).err_bound, 0.0);
  EXPECT_THROW(lemma_bound(0, 10, 1.0), DomainError);
  EXPECT_THROW(lemma_bound(10, 10, 1.0), DomainError);
  EXPECT_THROW(lemma_bound(3, 10, -1.0), DomainError);
}

TEST(IdPipeline, SlowDecaySingleMixedWithinOneMillionth) {
  const DenseMatrix& A = dataset(Decay::Slow);
  const DenseMatrix Ad = reconstruct(A, id_pipeline(A, 20, D, Variant::Double));
  const DenseMatrix Am = reconstruct(A, id_pipeline(A, 20, S, Variant::MixedLow));
  const double err = rel_spectral_error(Ad, Am);
  RecordProperty("error", sci(err));
  EXPECT_LE(err, 1e-6);
}

TEST(IdPipeline, DoubleErrorWithinLemmaBound) {
  for (Decay d : {Decay::Slow, Decay::Medium, Decay::Fast}) {
    const DenseMatrix& A = dataset(d);
    const PartialQR run = mgsqr_until(A, 40, D);
    ASSERT_EQ(run.qr.k, 40u);
    const double p = decay_exponent(d);
    for (std::size_t k : {10u, 20u, 40u}) {
      const IDApprox id = id_from_qr(leading(run.qr, k), Variant::Double);
      const double err = spectral_norm(subtract(A, build_id(A, id)));
      const double sigma = std::pow(static_cast<double>(k + 1), -p);
      EXPECT_LE(err, lemma_bound(k, A.cols(), sigma).err_bound) << name(d) << " k " << k;
      // and never better than optimal
      EXPECT_GE(err, sigma * (1 - 1e-6)) << name(d) << " k " << k;
    }
  }
}

TEST(IdPipeline, VariantOrdering) {
  for (Decay d : {Decay::Slow, Decay::Medium, Decay::Fast}) {
    const DenseMatrix& A = dataset(d);
    const double ed = rel_spectral_error(A, reconstruct(A, id_pipeline(A, 20, D, Variant::Double)));
    const double em = rel_spectral_error(A, reconstruct(A, id_pipeline(A, 20, S, Variant::MixedLow)));
    const double el = rel_spectral_error(A, reconstruct(A, id_pipeline(A, 20, S, Variant::Low)));
    EXPECT_LE(ed, em * (1 + 1e-3)) << name(d);
    EXPECT_LE(std::abs(el - em), 0.1 * em) << name(d);
  }
}
