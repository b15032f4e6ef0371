#include <random>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "doctest.h"
#include "oracles.hpp"
#include "stokes_mutant/cohomology.hpp"

using namespace sm;

namespace {
const double gam = boost::math::constants::euler<double>();
const CompleteIntersection P1 = CompleteIntersection::projective(1);
const CompleteIntersection P2 = CompleteIntersection::projective(2);
const CompleteIntersection P3 = CompleteIntersection::projective(3);
const CompleteIntersection cubic3{4, {3}};
const CompleteIntersection quadric3{4, {2}};

CVec random_class(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1, 1);
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(u(rng), u(rng));
  return v;
}
}  // namespace

TEST_SUITE("cohomology") {

TEST_CASE("invariants of the family") {
  CHECK(cubic3.dim() == 3);
  CHECK(cubic3.index() == 2);
  CHECK(cubic3.degree() == 3);
  CHECK(cubic3.D() == 27);
  CHECK(CompleteIntersection({5, {2, 3}}).Dprime() == 12);
  CHECK_NOTHROW(cubic3.validate());
  CHECK_NOTHROW(P1.validate());
  CHECK_THROWS(CompleteIntersection({4, {5}}).validate());
  CHECK_THROWS(CompleteIntersection({4, {2, 2}}).validate());
  CHECK_THROWS(CompleteIntersection({4, {1}}).validate());
  for (const auto& ci : fano_complete_intersections(7)) CHECK_NOTHROW(ci.validate());
}

TEST_CASE("Chern data") {
  auto cd = chern_data(P1);
  CHECK(cd.total[1] == cplx(2.0));
  CHECK(cd.power_sums[1] == 2.0);
  cd = chern_data(P2);
  CHECK(cd.power_sums[1] == 3.0);
  CHECK(cd.power_sums[2] == 3.0);
  CHECK(chern_data(cubic3).power_sums[1] == 2.0);
  // p_j = N + 1 - sum d_i^j, from log c(TX)
  for (const auto& ci : fano_complete_intersections(7)) {
    const auto p = chern_data(ci).power_sums;
    for (int j = 1; j <= ci.dim(); ++j) {
      double want = ci.N + 1;
      for (int a : ci.degrees) want -= std::pow(a, j);
      CHECK(p[j] == doctest::Approx(want));
    }
  }
}

TEST_CASE("Gamma class") {
  // d/dx Gamma(1+x)^2 at 0 = 2 psi(1)
  auto g = gamma_class(P1);
  CHECK(std::abs(g[0] - 1.0) == 0);
  CHECK(std::abs(g[1] - 2 * boost::math::digamma(1.0)) < 1e-15);
  g = gamma_class(P2);
  CHECK(std::abs(g[1] + 3 * gam) < 1e-15);
  CHECK(std::abs(g[2] - (4.5 * gam * gam + kPi * kPi / 4)) < 1e-14);
  CHECK(gamma_class(cubic3)[0] == cplx(1.0));
}

TEST_CASE("Todd class and Chern character") {
  CHECK(todd_class(P1, false).max_abs_diff(HPoly(1, {1.0, 1.0})) < 1e-15);
  CHECK(todd_class(P1, true).max_abs_diff(HPoly(1, {1.0, 2 * kPi * kI})) < 1e-15);
  for (int n = 1; n <= 6; ++n) {
    const auto t = oracle::todd_pn(n);
    const HPoly td = todd_class(CompleteIntersection::projective(n), false);
    for (int j = 0; j <= n; ++j) CHECK(std::abs(td[j] - static_cast<double>(t[j])) < 1e-13);
    const HPoly s = sqrt_todd(CompleteIntersection::projective(n), true);
    CHECK((s * s).max_abs_diff(todd_class(CompleteIntersection::projective(n), true)) < 1e-10);
  }
  CHECK(chern_character(P2, 0, true).max_abs_diff(HPoly::one(2)) == 0);
  CHECK(chern_character(P1, 1, true).max_abs_diff(HPoly(1, {1.0, 2 * kPi * kI})) < 1e-15);
  CHECK(chern_character(P2, 2, true).max_abs_diff(HPoly(2, {1.0, 4 * kPi * kI, -8 * kPi * kPi})) < 1e-12);
}

TEST_CASE("topology") {
  for (int n = 1; n <= 6; ++n) {
    CHECK(topological_euler(CompleteIntersection::projective(n)) == n + 1);
    CHECK(primitive_dim(CompleteIntersection::projective(n)) == 0);
  }
  CHECK(topological_euler(cubic3) == -6);
  CHECK(primitive_dim(cubic3) == 10);
  CHECK(topological_euler(quadric3) == 4);
  CHECK(primitive_dim(quadric3) == 0);
  for (const auto& ci : fano_complete_intersections(7))
    CHECK(topological_euler(ci) == oracle::chi_top(ci.N, ci.degrees));
}

TEST_CASE("integration and model layout") {
  const CohomologyModel X1(P1), X3(cubic3);
  CHECK(integrate(X1, X1.ambient(HPoly::monomial(1, 1))) == cplx(1.0));
  CHECK(integrate(X3, X3.ambient(HPoly::monomial(3, 3))) == cplx(3.0));
  CHECK(integrate(X3, X3.ambient(HPoly::one(3))) == cplx(0.0));
  CHECK(X3.n == 14);
  CHECK((X3.gram + X3.gram.transpose()).bottomRightCorner(10, 10).norm() == 0);  // symplectic
}

TEST_CASE("pairings") {
  const CohomologyModel X1(P1);
  CHECK(std::abs(pairing_A(X1, gamma_ch(X1, 0), gamma_ch(X1, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(pairing_A(X1, gamma_ch(X1, 0), gamma_ch(X1, 1)) - 2.0) < 1e-14);
  const CVec one = X1.ambient(HPoly::one(1)), H = X1.ambient(HPoly::monomial(1, 1));
  CHECK(std::abs(pairing_B(X1, one, one) - 1.0) < 1e-15);
  CHECK(std::abs(pairing_B(X1, one, H) - 1.0 / (2 * kPi * kI)) < 1e-15);
  std::mt19937_64 rng(1);
  for (const auto& ci : {P1, P2, P3, cubic3, quadric3, CompleteIntersection{6, {2, 2}}}) {
    const CohomologyModel X(ci);
    // [T a, b> = (-1)^{deg a} [b, a> as an operator identity
    CMat G = CMat::Identity(X.n, X.n);
    for (int k = 0; k < X.n; ++k)
      if (X.parity[k]) G(k, k) = -1;
    const CMat PB = X.pairing_B(), T = X.serre_monodromy();
    CHECK((T.transpose() * PB - G * PB.transpose()).norm() < 1e-12 * PB.norm());
    CHECK((X.pairing_A() - PB).norm() < 1e-13 * PB.norm());
    // ambient and primitive do not pair
    CHECK(PB.topRightCorner(X.d + 1, X.b).norm() == 0);
    CHECK(PB.bottomLeftCorner(X.b, X.d + 1).norm() == 0);
    if (X.b) {
      const CVec a = random_class(rng, X.n), b = random_class(rng, X.n);
      CVec pa = CVec::Zero(X.n), pb = CVec::Zero(X.n);
      pa.tail(X.b) = a.tail(X.b);
      pb.tail(X.b) = b.tail(X.b);
      const cplx poinc = (pa.transpose() * X.gram * pb)(0, 0);
      CHECK(std::abs(pairing_A(X, pa, pb) - poinc / std::pow(2 * kPi, X.d)) < 1e-14);
    }
  }
}

TEST_CASE("Serre monodromy") {
  const CohomologyModel X1(P1);
  CMat want(2, 2);
  want << 1, 0, 4 * kPi * kI, 1;
  CHECK((X1.serre_monodromy() + want).norm() < 1e-14);
  CHECK(std::abs(X1.serre_monodromy().trace() + 2.0) < 1e-14);
  const CohomologyModel X3(cubic3);
  const CMat T = X3.serre_monodromy();
  CHECK((T.bottomRightCorner(10, 10) - CMat::Identity(10, 10)).norm() == 0);
  // e^{-2 pi i mu} e^{2 pi i rho}
  CMat e = CMat::Identity(X3.n, X3.n);
  for (int j = 0; j <= 3; ++j) e(j, j) = std::exp(-2 * kPi * kI * (j - 1.5));
  CHECK((T - e * X3.exp_rho(2 * kPi * kI)).norm() < 1e-12);
}

TEST_CASE("Gamma map") {
  const CohomologyModel X1(P1);
  const GammaChoice A{GammaConvention::todd, false}, B{GammaConvention::sqrt_todd, true};
  const CVec one = X1.ambient(HPoly::one(1)), H = X1.ambient(HPoly::monomial(1, 1));
  CVec want(2);
  want << 1, -(1 + 2 * gam);
  CHECK((gamma_map(X1, one, A) - want).norm() < 1e-15);
  CHECK((gamma_map(X1, H, A) - H).norm() == 0);
  CHECK((gamma_map(X1, H, B) - H).norm() == 0);
  CHECK(gamma_map(X1, CVec::Zero(2), B).norm() == 0);
  // Mukai vectors go to Gamma-hat Ch
  for (const auto& ci : {P2, P3, cubic3}) {
    const CohomologyModel X(ci);
    const CMat G = gamma_matrix(X, B);
    Eigen::JacobiSVD<CMat> svd(G);
    CHECK(svd.singularValues().minCoeff() > 1e-6);
    for (int k = 0; k < ci.index(); ++k) CHECK((G * mukai_vector(X, k) - gamma_ch(X, k)).norm() < 1e-12);
  }
}

TEST_CASE("convention resolution") {
  // P^1 alone cannot tell the candidates apart
  const auto p1 = resolve_gamma_convention({P1}, 0, 1);
  CHECK_FALSE(p1.unique);
  const auto r = resolve_gamma_convention({P2, P3, cubic3}, 300, 2);
  CHECK(r.unique);
  CHECK(r.selected.convention == GammaConvention::sqrt_todd);
  CHECK(r.selected.twist);
  std::mt19937_64 rng(3);
  const CohomologyModel X(P1);
  for (const auto& t : r.trials)
    CHECK(pairing_compat_residual(X, t.choice, random_class(rng, 2), random_class(rng, 2)) < 1e-12);
}

TEST_CASE("Gamma series identity") {
  // e^{pi i z} Gamma(1-z) Gamma(1+z) = 2 pi i z / (1 - e^{-2 pi i z}) to degree 8
  const int D = 8;
  HPoly lp(D), lm(D), q(D), ez(D);
  lp[1] = -gam;
  lm[1] = gam;
  for (int k = 2; k <= D; ++k) {
    lp[k] = (k % 2 ? -1.0 : 1.0) * boost::math::zeta(double(k)) / k;
    lm[k] = boost::math::zeta(double(k)) / k;
  }
  ez[1] = kPi * kI;
  const HPoly lhs = ez.exp() * lm.exp() * lp.exp();
  // (1 - e^{-w})/w with w = 2 pi i z
  double fact = 1;
  for (int j = 0; j <= D; ++j) {
    fact *= (j + 1);
    q[j] = std::pow(-2 * kPi * kI, j) / fact;
  }
  const HPoly rhs = q.inverse();
  for (int j = 0; j <= D; ++j) CHECK(std::abs(lhs[j] - rhs[j]) <= 1e-12 * std::max(1.0, std::abs(rhs[j])));
}

TEST_CASE("Euler characteristics") {
  for (int n = 1; n <= 6; ++n) {
    const auto ci = CompleteIntersection::projective(n);
    const CohomologyModel X(ci);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        const cplx chi = euler_chi(X, i, j);
        const auto want = oracle::chi_koszul(n, {}, j - i);
        CHECK(std::abs(chi - double(want)) < 1e-9 * std::max<double>(1, std::abs(double(want))));
        if (j >= i) CHECK(want == oracle::binom(n + j - i, n));
      }
  }
  for (const auto& ci : fano_complete_intersections(7)) {
    const CohomologyModel X(ci, false);
    for (int i = 0; i < ci.index(); ++i)
      for (int j = 0; j < ci.index(); ++j) {
        CHECK(euler_chi_hrr(ci, i, j) == oracle::chi_koszul(ci.N, ci.degrees, j - i));
        CHECK(std::llround(euler_chi(X, i, j).real()) == oracle::chi_koszul(ci.N, ci.degrees, j - i));
      }
  }
}

}  // TEST_SUITE
