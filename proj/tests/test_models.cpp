#include "mpsbell/models.hpp"
#include "mpsbell/mps.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mpsbell;

namespace {

const ChainLength kInf = ChainLength::infinite();

ComplexMatrix m2(double a, double b, double c, double d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ComplexMatrix engine_state(const ModelFamily &f, double g, int r) {
  const MPSModel m = f.at(g);
  return r == 0 ? rdm_adjacent(m, 1, kInf) : rdm_pair(m, r, kInf);
}

} // namespace

TEST(LadderFamily, MatricesAtZero) {
  const ModelFamily f = ladder_family(1.0);
  EXPECT_EQ(f.d, 4);
  EXPECT_EQ(f.D, 2);
  EXPECT_EQ(f.name, "ladder");
  const MPSModel m = f.at(0.0);
  // Stored in two-qubit order: A3 (|00>), A1 (|01>), A2 (|10>), A4 (|11>).
  EXPECT_EQ(max_abs(m[0]), 0.0);
  EXPECT_EQ(m[1], ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(m[2], ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(m[3], m2(0, 0, 1, 0));
  EXPECT_EQ(ladder_family(1.5).at(0.0)[1], 1.5 * ComplexMatrix::Identity(2, 2));
  EXPECT_EQ(ladder_family(1.0).at(0.8)[0], m2(0, 0.8, 0, 0));
}

TEST(LadderFamily, RejectsZeroCoupling) {
  EXPECT_THROW(ladder_family(0.0), InvalidModel);
}

TEST(LadderFamily, DependsOnlyOnX) {
  const ComplexMatrix a = engine_state(ladder_family(1.0), 2.0, 0);
  const ComplexMatrix b = engine_state(ladder_family(std::sqrt(2.0)), 4.0, 0);
  EXPECT_LT(max_abs(a - b), 1e-12);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0), av(0.3, 2.5);
  for (int t = 0; t < 20; ++t) {
    const double x = u(rng), a1 = av(rng), a2 = av(rng);
    EXPECT_LT(max_abs(engine_state(ladder_family(a1), ladder_g(x, a1), 0) -
                      engine_state(ladder_family(a2), ladder_g(x, a2), 0)),
              1e-10);
  }
}

TEST(LadderFamily, RungAtZeroIsBellState) {
  const ModelFamily f = ladder_family(1.0);
  EXPECT_LT(max_abs(closed_form_rdm(f, 0.0, 0).matrix() - oracle::bell_01_10()), 1e-15);
  const ComplexMatrix rho = rdm_adjacent(f.at(0.0), 1, ChainLength::finite(kFallbackSites));
  EXPECT_LT(max_abs(rho - oracle::bell_01_10()), 1e-6);
}

TEST(XyzFamily, MatricesAtOne) {
  const MPSModel m = xyz_family().at(1.0);
  EXPECT_EQ(m[0], m2(1, 1, 1, 1));
  EXPECT_EQ(m[1], m2(1, -1, -1, 1));
}

TEST(ThreeBodyFamily, MatricesAtHalf) {
  const MPSModel m = three_body_family().at(0.5);
  EXPECT_EQ(m[0], m2(0, 0, 1, 1));
  EXPECT_EQ(m[1], m2(1, 0.5, 0, 0));
}

TEST(ThreeBodyFamily, DiagonalForNegativeG) {
  const ModelFamily f = three_body_family();
  for (double g : {-1.8, -1.0, -0.6, -0.1}) {
    for (int r = 1; r <= 6; ++r) {
      ComplexMatrix off = engine_state(f, g, r);
      off.diagonal().setZero();
      EXPECT_LT(max_abs(off), 1e-10) << "g=" << g << " r=" << r;
    }
  }
}

TEST(BuiltinFamily, LookupByName) {
  EXPECT_EQ(builtin_family("ladder", 2.0).ladder_a, 2.0);
  EXPECT_EQ(builtin_family("xyz").kind, FamilyKind::xyz);
  EXPECT_EQ(builtin_family("three_body").kind, FamilyKind::three_body);
  EXPECT_THROW(builtin_family("heisenberg"), UnsupportedFamily);
}

TEST(ClosedForm, LadderPattern) {
  const ComplexMatrix rho = closed_form_rdm(ladder_family(1.0), 0.6, 0).matrix();
  ComplexMatrix expected(4, 4);
  expected << 0.3, 0, 0, 0,
              0, 1, 1, 0,
              0, 1, 1, 0,
              0, 0, 0, 0.3;
  EXPECT_LT(max_abs(rho - expected / 2.6), 1e-15);
  // |x| is taken verbatim.
  EXPECT_LT(max_abs(closed_form_rdm(ladder_family(1.0), -0.6, 0).matrix() - rho), 1e-15);
}

TEST(ClosedForm, ThreeBodyClassicalNearestNeighbour) {
  const ComplexMatrix rho = closed_form_rdm(three_body_family(), -0.5, 1).matrix();
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1, 0.5, 0.5, 1;
  EXPECT_LT(max_abs(rho - expected / 3.0), 1e-15);
}

TEST(ClosedForm, ThreeBodyDistanceThree) {
  const double t3 = 1.0 / 27.0;
  const ComplexMatrix rho = closed_form_rdm(three_body_family(), -0.5, 3).matrix();
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected.diagonal() << 1 + t3, 1 - t3, 1 - t3, 1 + t3;
  EXPECT_LT(max_abs(rho - expected / 4.0), 1e-15);
}

TEST(ClosedForm, BranchesAgreeAtZero) {
  EXPECT_NO_THROW(closed_form_rdm(xyz_family(), 0.0, 1));
  for (int r : {1, 2, 5}) EXPECT_NO_THROW(closed_form_rdm(three_body_family(), 0.0, r));
  ComplexMatrix all = ComplexMatrix::Constant(4, 4, 0.25);
  EXPECT_LT(max_abs(closed_form_rdm(xyz_family(), 0.0, 3).matrix() - all), 1e-15);
}

TEST(ClosedForm, UnsupportedRequests) {
  EXPECT_THROW(closed_form_rdm(ladder_family(1.0), 0.3, 1), UnsupportedFamily);
  EXPECT_THROW(closed_form_rdm(xyz_family(), 0.3, 0), UnsupportedFamily);
  EXPECT_THROW(closed_form_rdm(three_body_family(), 0.3, 0), UnsupportedFamily);
  ModelFamily custom = xyz_family();
  custom.kind = FamilyKind::custom;
  custom.name = "mine";
  EXPECT_THROW(closed_form_rdm(custom, 0.3, 1), UnsupportedFamily);
}

TEST(ClosedForm, NearestNeighbourThreeBodyStateIsPhysical) {
  for (double g = 0.01; g <= 2.0; g += 0.01) {
    EXPECT_NO_THROW(closed_form_rdm(three_body_family(), g, 1)) << "g=" << g;
  }
}

TEST(ClosedForm, EngineEquivalenceOnDenseGrid) {
  struct Case {
    ModelFamily family;
    std::vector<int> distances;
  };
  const std::vector<Case> cases{{ladder_family(1.0), {0}},
                                {ladder_family(0.7), {0}},
                                {xyz_family(), {1, 2, 4}},
                                {three_body_family(), {1, 2, 3, 8}}};
  for (const auto &c : cases) {
    for (int i = 0; i < 400; ++i) {
      const double g = -1.99 + 3.98 * i / 399.0;
      if (std::abs(g) < 1e-3 || std::abs(std::abs(g) - 1.0) < 1e-3) continue;
      for (int r : c.distances) {
        const double err = max_abs(engine_state(c.family, g, r) - closed_form_rdm(c.family, g, r).matrix());
        EXPECT_LE(err, 1e-8) << c.family.name << " g=" << g << " r=" << r;
      }
    }
  }
}

TEST(HamiltonianCoefficients, Xyz) {
  const auto c = std::get<XyzCoefficients>(hamiltonian_coefficients(xyz_family(), 1.0, 0.0));
  EXPECT_DOUBLE_EQ(c.jx, 1.0);
  EXPECT_DOUBLE_EQ(c.jy, 1.0);
  EXPECT_DOUBLE_EQ(c.jz, -1.0);
  EXPECT_DOUBLE_EQ(c.field, 0.0);
  const auto d = std::get<XyzCoefficients>(hamiltonian_coefficients(xyz_family(), 0.5, 2.0));
  EXPECT_DOUBLE_EQ(d.jx, -2.0 + 0.625);
  EXPECT_DOUBLE_EQ(d.jy, -1.5);
  EXPECT_DOUBLE_EQ(d.jz, -2.5);
  EXPECT_DOUBLE_EQ(d.field, 0.75);
}

TEST(HamiltonianCoefficients, ThreeBody) {
  const auto plus = std::get<ThreeBodyCoefficients>(hamiltonian_coefficients(three_body_family(), 1.0));
  EXPECT_DOUBLE_EQ(plus.j3, 0.0);
  EXPECT_DOUBLE_EQ(plus.jz, 0.0);
  EXPECT_DOUBLE_EQ(plus.field, 4.0);
  const auto minus = std::get<ThreeBodyCoefficients>(hamiltonian_coefficients(three_body_family(), -1.0));
  EXPECT_DOUBLE_EQ(minus.j3, 4.0);
  EXPECT_DOUBLE_EQ(minus.jz, 0.0);
  EXPECT_DOUBLE_EQ(minus.field, 0.0);
}

TEST(HamiltonianCoefficients, LadderUnsupported) {
  EXPECT_THROW(hamiltonian_coefficients(ladder_family(1.0), 0.5), UnsupportedFamily);
}
