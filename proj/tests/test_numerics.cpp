#include "mpsbell/models.hpp"
#include "mpsbell/mps.hpp"
#include "mpsbell/numerics.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mpsbell;

namespace {

ComplexMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

double rel(const ComplexMatrix &a, const ComplexMatrix &b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); }

} // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  const ComplexMatrix m = m2({1, 2}, {3, -1}, {0.5, 0}, {-2, 4});
  EXPECT_EQ(matmul(ComplexMatrix::Identity(2, 2), m), m);
}

TEST(Matmul, LadderA4IsNilpotent) {
  const ComplexMatrix a4 = m2(0, 0, 1, 0);
  EXPECT_EQ(max_abs(matmul(a4, a4)), 0.0);
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = oracle::random_matrix(rng, 3, 3), b = oracle::random_matrix(rng, 3, 3);
    EXPECT_LT(rel(matmul(a, b), oracle::matmul(a, b)), 1e-13);
  }
  const ComplexMatrix a = oracle::random_matrix(rng, 2, 5), b = oracle::random_matrix(rng, 5, 3);
  const ComplexMatrix p = matmul(a, b);
  EXPECT_EQ(p.rows(), 2);
  EXPECT_EQ(p.cols(), 3);
  EXPECT_LT(rel(p, oracle::matmul(a, b)), 1e-13);
}

TEST(Matmul, RejectsDimensionMismatch) {
  EXPECT_THROW(matmul(ComplexMatrix::Zero(2, 3), ComplexMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST(Matmul, Associative) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix a = oracle::random_matrix(rng, 4, 4), b = oracle::random_matrix(rng, 4, 4),
                        c = oracle::random_matrix(rng, 4, 4);
    EXPECT_LT(rel(matmul(matmul(a, b), c), matmul(a, matmul(b, c))), 1e-12);
  }
}

TEST(Kron, IdentityTimesIdentity) {
  EXPECT_EQ(kron(pauli::identity(), pauli::identity()), ComplexMatrix::Identity(4, 4));
}

TEST(Kron, SigmaXSquaredIsAntiDiagonal) {
  const ComplexMatrix k = kron(pauli::x(), pauli::x());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_EQ(k(i, j), Complex(i + j == 3 ? 1.0 : 0.0, 0.0));
}

TEST(Kron, MatchesIndexFormula) {
  std::mt19937_64 rng(13);
  const ComplexMatrix a = oracle::random_matrix(rng, 2, 3), b = oracle::random_matrix(rng, 3, 2);
  const ComplexMatrix k = kron(a, b);
  EXPECT_EQ(k.rows(), 6);
  EXPECT_EQ(k.cols(), 6);
  EXPECT_EQ(max_abs(k - oracle::kron(a, b)), 0.0);
}

TEST(Kron, MixedProduct) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix a = oracle::random_matrix(rng, 2, 2), b = oracle::random_matrix(rng, 2, 2),
                        c = oracle::random_matrix(rng, 2, 2), d = oracle::random_matrix(rng, 2, 2);
    EXPECT_LT(rel(kron(a * c, b * d), kron(a, b) * kron(c, d)), 1e-12);
  }
}

TEST(EigGeneral, DiagonalSortedByModulus) {
  ComplexMatrix m = ComplexMatrix::Zero(3, 3);
  m(0, 0) = 3;
  m(1, 1) = 1;
  m(2, 2) = 2;
  const GeneralEigen e = eig_general(m);
  ASSERT_EQ(e.values.size(), 3u);
  EXPECT_NEAR(e.values[0].real(), 3.0, 1e-14);
  EXPECT_NEAR(e.values[1].real(), 2.0, 1e-14);
  EXPECT_NEAR(e.values[2].real(), 1.0, 1e-14);
}

TEST(EigGeneral, SigmaXTieBrokenByRealPart) {
  const GeneralEigen e = eig_general(pauli::x());
  EXPECT_NEAR(e.values[0].real(), 1.0, 1e-14);
  EXPECT_NEAR(e.values[1].real(), -1.0, 1e-14);
}

TEST(EigGeneral, ThreeBodyAtOneHasUniqueDominant) {
  const ComplexMatrix e = oracle::transfer(three_body_family().at(1.0).matrices());
  const GeneralEigen eig = eig_general(e);
  EXPECT_GT(std::abs(eig.values[0]), std::abs(eig.values[1]) + 1e-6);
  // Reference: for this family the nonzero spectrum is {1 + g, 1 - g}.
  EXPECT_NEAR(eig.values[0].real(), 2.0, 1e-12);
}

TEST(EigGeneral, ResidualsAndBiorthogonality) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 30; ++t) {
    const ComplexMatrix m = oracle::random_matrix(rng, 5, 5);
    const GeneralEigen e = eig_general(m);
    const double norm = m.operatorNorm();
    for (std::size_t k = 0; k < e.values.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      EXPECT_LE((m * e.right.col(i) - e.values[k] * e.right.col(i)).norm(), 1e-9 * norm);
      EXPECT_LE((e.left.row(i) * m - e.values[k] * e.left.row(i)).norm(), 1e-9 * norm * e.left.row(i).norm());
      EXPECT_NEAR(std::abs((e.left.row(i) * e.right.col(i))(0, 0) - Complex(1, 0)), 0.0, 1e-10);
      if (k > 0) {
        EXPECT_GE(std::abs(e.values[k - 1]) + 1e-12, std::abs(e.values[k]));
      }
    }
  }
}

TEST(EigGeneral, RejectsNonSquare) { EXPECT_THROW(eig_general(ComplexMatrix::Zero(2, 3)), DimensionMismatch); }

TEST(EigGeneral, RejectsNonFinite) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(eig_general(m), EigensolverFailure);
}

TEST(EigHermitian, SigmaZ) {
  const HermitianEigen e = eig_hermitian(pauli::z());
  EXPECT_NEAR(e.values(0), -1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 1.0, 1e-15);
}

TEST(EigHermitian, MaximallyMixed) {
  const HermitianEigen e = eig_hermitian(ComplexMatrix::Identity(4, 4) / 4.0);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(e.values(k), 0.25, 1e-15);
}

TEST(EigHermitian, ReconstructionUnitarityAndTrace) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 50; ++t) {
    const ComplexMatrix h = oracle::random_hermitian(rng, 4);
    const HermitianEigen e = eig_hermitian(h);
    const ComplexMatrix back = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LT(max_abs(back - h), 1e-10);
    EXPECT_LT(max_abs(e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(4, 4)), 1e-10);
    EXPECT_NEAR(e.values.sum(), h.trace().real(), 1e-10);
    for (int k = 1; k < 4; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
  }
}

TEST(EigHermitian, RejectsNonHermitian) {
  EXPECT_THROW(eig_hermitian(m2(1, 1, 0, 1)), NotHermitian);
  // Within tolerance is accepted.
  EXPECT_NO_THROW(eig_hermitian(m2(1, Complex(1, 0), Complex(1 + 1e-12, 0), 1)));
}
