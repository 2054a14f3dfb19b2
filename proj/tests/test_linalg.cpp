#include <gtest/gtest.h>

#include "atomgreed/linalg.hpp"
#include "atomgreed/random.hpp"

using namespace atomgreed;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(Orthonormalize, RescalesOrthogonalInput) {
  const std::vector<Vector> in = {vec({1, 0}), vec({0, 2})};
  const auto out = orthonormalize(in);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out[0].isApprox(vec({1, 0})));
  EXPECT_TRUE(out[1].isApprox(vec({0, 1})));
}

TEST(Orthonormalize, DropsDuplicate) {
  const std::vector<Vector> in = {vec({1, 0}), vec({1, 0})};
  const auto out = orthonormalize(in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(out[0].isApprox(vec({1, 0})));
}

TEST(Orthonormalize, SpansPlane) {
  const std::vector<Vector> in = {vec({1, 1}), vec({1, 0})};
  const Matrix b = as_columns(orthonormalize(in), 2);
  ASSERT_EQ(b.cols(), 2);
  EXPECT_LT((b.transpose() * b - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  // span equals R^2: every input is reproduced by its projection
  for (const Vector& v : in) EXPECT_LT((project(v, b) - v).norm(), 1e-12);
}

TEST(Orthonormalize, RandomGramWithinTolerance) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> in;
    for (int k = 0; k < 6; ++k) in.push_back(gaussian_vector(8, rng));
    in.push_back(in[0] + 2 * in[3]);  // dependent
    const Matrix b = as_columns(orthonormalize(in), 8);
    EXPECT_EQ(b.cols(), 6);
    EXPECT_LT((b.transpose() * b - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 10 * kRankTolerance);
  }
}

TEST(Orthonormalize, Errors) {
  const std::vector<Vector> bad = {vec({1, 0}), vec({1, 0, 0})};
  EXPECT_THROW(orthonormalize(bad), DimensionMismatch);
  const std::vector<Vector> ok = {vec({1, 0})};
  EXPECT_THROW(orthonormalize(ok, 0.0), InvalidArgument);
}

TEST(Project, CoordinateAndEmpty) {
  const std::vector<Vector> basis = {vec({1, 0, 0}), vec({0, 0, 1})};
  EXPECT_TRUE(project(vec({1, 2, 3}), basis).isApprox(vec({1, 0, 3})));
  const std::vector<Vector> none;
  EXPECT_EQ(project(vec({1, 2}), none), vec({0, 0}));
  EXPECT_EQ(project(vec({1, 2}), Matrix(2, 0)), vec({0, 0}));
  EXPECT_THROW(project(vec({1, 2}), basis), DimensionMismatch);
}

TEST(Project, IdempotentAndLinear) {
  Rng rng(5);
  const Matrix b = as_columns(orthonormalize(std::vector<Vector>{gaussian_vector(6, rng), gaussian_vector(6, rng),
                                                                  gaussian_vector(6, rng)}),
                              6);
  for (int i = 0; i < 50; ++i) {
    const Vector u = gaussian_vector(6, rng), v = gaussian_vector(6, rng);
    const Vector pu = project(u, b);
    EXPECT_LT((project(pu, b) - pu).norm(), 1e-12);
    const double a = 1.7, c = -0.3;
    EXPECT_LT((project(a * u + c * v, b) - (a * pu + c * project(v, b))).norm(), 1e-10);
  }
}

TEST(Svd, Diagonal) {
  Matrix m(2, 2);
  m << 3, 0, 0, 1;
  const Svd s = svd(m);
  EXPECT_TRUE(s.sigma.isApprox(vec({3, 1})));
  EXPECT_TRUE(s.u.cwiseAbs().isApprox(Matrix::Identity(2, 2)));
  EXPECT_TRUE(s.v.isApprox(Matrix::Identity(2, 2)));
}

TEST(Svd, ZeroMatrix) {
  const Svd s = svd(Matrix::Zero(3, 2));
  EXPECT_EQ(s.sigma.size(), 2);
  EXPECT_EQ(s.sigma.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Svd, RandomReconstruction) {
  Rng rng(3);
  for (Index rows : {4, 10, 50}) {
    for (Index cols : {3, 10, 50}) {
      const Matrix m = gaussian_matrix(rows, cols, rng);
      const Svd s = svd(m);
      const double err = (m - s.u * s.sigma.asDiagonal() * s.v.transpose()).norm();
      EXPECT_LT(err, 1e-10 * m.norm()) << rows << "x" << cols;
      for (Index i = 1; i < s.sigma.size(); ++i) EXPECT_LE(s.sigma(i), s.sigma(i - 1));
      EXPECT_GE(s.sigma.minCoeff(), 0.0);
      const Index k = s.sigma.size();
      EXPECT_LT((s.u.transpose() * s.u - Matrix::Identity(k, k)).norm(), 1e-10);
      EXPECT_LT((s.v.transpose() * s.v - Matrix::Identity(k, k)).norm(), 1e-10);
    }
  }
}

TEST(Svd, NonFiniteInputRejected) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = NAN;
  EXPECT_THROW(svd(m), NonConvergence);
}

TEST(SolveLsq, IdentityAndMean) {
  EXPECT_TRUE(solve_lsq(Matrix::Identity(2, 2), vec({1, 2})).isApprox(vec({1, 2})));
  Matrix col(2, 1);
  col << 1, 1;
  const Vector c = solve_lsq(col, vec({1, 3}));
  ASSERT_EQ(c.size(), 1);
  EXPECT_NEAR(c(0), 2.0, 1e-14);
}

TEST(SolveLsq, ResidualOrthogonalToColumns) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const Matrix m = gaussian_matrix(12, 5, rng);
    const Vector b = gaussian_vector(12, rng);
    const Vector c = solve_lsq(m, b);
    EXPECT_LT((m.transpose() * (m * c - b)).norm(), 1e-10);
  }
}

TEST(SolveLsq, MinimumNormWhenRankDeficient) {
  Matrix m(2, 2);
  m << 1, 1, 1, 1;
  const Vector c = solve_lsq(m, vec({2, 2}));
  EXPECT_TRUE(c.isApprox(vec({1, 1})));
  EXPECT_THROW(solve_lsq(m, vec({1, 2, 3})), DimensionMismatch);
}

TEST(Reshape, RowMajorRoundTrip) {
  const Vector v = vec({1, 2, 3, 4, 5, 6});
  const Matrix m = reshape(v, 2, 3);
  EXPECT_EQ(m(0, 2), 3);
  EXPECT_EQ(m(1, 0), 4);
  EXPECT_EQ(flatten(m), v);
  EXPECT_THROW(reshape(v, 4, 2), DimensionMismatch);
}

TEST(Random, DeterministicStreams) {
  Rng a = make_rng(42, 3), b = make_rng(42, 3), c = make_rng(42, 4);
  const Vector x = gaussian_vector(5, a), y = gaussian_vector(5, b), z = gaussian_vector(5, c);
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
}

TEST(Random, OrthogonalIsOrthogonal) {
  Rng rng(1);
  const Matrix q = random_orthogonal(6, rng);
  EXPECT_LT((q.transpose() * q - Matrix::Identity(6, 6)).norm(), 1e-12);
}
