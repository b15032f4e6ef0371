#include "doctest.h"
#include "oracles.hpp"
#include "stokes_mutant/dubrovin.hpp"
#include "stokes_mutant/subspace.hpp"

using namespace sm;

namespace {
CMat binomial_gram(int n) {
  CMat g = CMat::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = i; j <= n; ++j) g(i, j) = double(oracle::binom(n + j - i, n));
  return g;
}
}  // namespace

TEST_SUITE("dubrovin") {

TEST_CASE("center tuple order") {
  const CompleteIntersection cubic{4, {3}};
  const auto C = exponents(cubic);
  const auto t = center_tuple(C, 2, 0.1);
  CHECK(is_ordered(t, C));
  const auto tau = tau_theta_bullet(t, C);
  CHECK(C[tau.at(0)].id == "o");
  CHECK(C[tau.at(1)].id == "k0");
  CHECK(C[tau.at(2)].id == "k1");
  const auto phi = clamped_tuple(t, 0.1);
  CHECK(phi.per_exponent[C.index_of("k1")] == doctest::Approx(0.1 - kPi));
  CHECK(is_ordered(phi, C));
}

TEST_CASE("inversion set identities") {
  for (const auto& ci : {CompleteIntersection::projective(1), CompleteIntersection::projective(2),
                         CompleteIntersection::projective(3), CompleteIntersection::projective(5),
                         CompleteIntersection{4, {3}}, CompleteIntersection{4, {2}},
                         CompleteIntersection{5, {2, 2}}, CompleteIntersection{6, {2}}})
    for (double th : {0.1, 0.05, 0.3}) {
      const auto C = exponents(ci);
      const int r = ci.index();
      if (!is_ordered(center_tuple(C, r, th), C)) continue;
      for (const auto& v : {first_inversion_identity(C, r, th), second_inversion_identity(C, r, th)})
        for (const auto& c : v) {
          INFO(ci.name() << " theta0 " << th << " " << c.id << ": " << fmt_set(C, c.lhs) << " "
                         << fmt_set(C, c.rhs) << " " << fmt_set(C, c.closed));
          CHECK(c.lhs == c.rhs);
          CHECK(c.lhs == c.closed);
        }
    }
}

TEST_CASE("projective line") {
  const auto rep = dubrovin_check(CompleteIntersection::projective(1), {});
  INFO(rep.markdown());
  CHECK(rep.verdict);
  CMat euler(2, 2);
  euler << 1, 2, 0, 1;
  CHECK(gram_distance_up_to_signs(rep.gram_b, euler) < 1e-9);
  CHECK(gram_distance_up_to_signs(rep.gram_a, euler) < 1e-6);
}

TEST_CASE("projective plane and space") {
  for (int n : {2, 3}) {
    const auto rep = dubrovin_check(CompleteIntersection::projective(n), {});
    INFO(rep.markdown());
    CHECK(rep.verdict);
    CHECK(rep.worst_distance() <= 1e-3);
    // at theta0 = 0.1 the order of P2 is already O(0), O(1), O(2)
    if (n == 2) CHECK(gram_distance_up_to_signs(rep.gram_b, binomial_gram(2)) < 1e-9);
  }
}

TEST_CASE("cubic threefold") {
  const auto rep = dubrovin_check(CompleteIntersection{4, {3}}, {});
  INFO(rep.markdown());
  CHECK(rep.verdict);
  CHECK(rep.residual_consistency <= 1e-8);
  CHECK(rep.line_ids.size() == 2);
  for (const auto& d : rep.at_theta0) {
    CHECK(d.dim_a == d.dim_b);
    CHECK(d.distance <= 1e-3);
  }
}

TEST_CASE("the Todd convention is rejected") {
  DubrovinOptions opt;
  opt.convention = DubrovinOptions::Convention::a;
  const auto rep = dubrovin_check(CompleteIntersection::projective(2), opt);
  CHECK_FALSE(rep.verdict);
  CHECK(rep.worst_distance() > 1e-2);
}

}  // TEST_SUITE
