#include <random>

#include "doctest.h"
#include "stokes_mutant/direction.hpp"

using namespace sm;

namespace {

ExponentSet two_point() { return ExponentSet({{"a", -2.0}, {"b", 2.0}}); }

ExponentSet p2_exponents() {
  const cplx w = std::polar(1.0, -2 * kPi / 3);
  return ExponentSet({{"c0", -3.0}, {"c1", -3.0 * w}, {"c2", -3.0 * w * w}});
}

}  // namespace

TEST_SUITE("direction") {

TEST_CASE("order examples") {
  CHECK(leq_theta(0.0, 1.0, 0.0));
  CHECK(leq_theta(cplx(0.3, 0.2), cplx(0.3, 0.2), 1.7));
  CHECK_FALSE(leq_theta(kI, 2.0 * kI, 0.0));
  CHECK_FALSE(leq_theta(2.0 * kI, kI, 0.0));
}

TEST_CASE("stokes directions") {
  auto s = stokes_directions(1.0, 0.0);
  CHECK(s[0] == doctest::Approx(kPi / 2));
  CHECK(s[1] == doctest::Approx(3 * kPi / 2));
  s = stokes_directions(kI, 0.0);
  CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(kPi));
  s = stokes_directions(cplx(1, 1), cplx(1, -1));
  CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s[1] == doctest::Approx(kPi));
  CHECK_THROWS(stokes_directions(2.0, 2.0));
}

TEST_CASE("genericity") {
  CHECK(is_generic(0.1, two_point()));
  CHECK_FALSE(is_generic(0.0, two_point()));
  CHECK(is_generic(0.0, ExponentSet({{"x", 1.0}})));
  // openness
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int k = 0; k < 200; ++k) {
    const double t = u(rng);
    if (!is_generic(t, p2_exponents())) continue;
    CHECK(is_generic(t + 0.4 * kTolAngle, p2_exponents()));
    CHECK(is_generic(t - 0.4 * kTolAngle, p2_exponents()));
  }
}

TEST_CASE("tau_theta") {
  // Re e^{-i(theta+pi/2)} c = -c sin(theta) for real c, so 2 comes first
  auto o = tau_theta(two_point(), 0.1);
  CHECK(o.seq == std::vector<int>{1, 0});
  CHECK_THROWS(tau_theta(two_point(), 0.0));
  // P^2: Re e^{-i(0.1+pi/2)} c = Im(e^{-0.1i} c) orders c2 < c0 < c1
  const auto C = p2_exponents();
  o = tau_theta(C, 0.1);
  std::vector<double> key;
  for (int c : o.seq) key.push_back(std::imag(std::polar(1.0, -0.1) * C.value(c)));
  CHECK(key[0] < key[1]);
  CHECK(key[1] < key[2]);
  CHECK(o.seq == std::vector<int>{2, 0, 1});
  CHECK(tau_theta(ExponentSet({{"x", 5.0}}), 2.0).seq == std::vector<int>{0});
}

TEST_CASE("partial order properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 2000; ++k) {
    cplx a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const double t = u(rng) * 3;
    if (leq_theta(a, b, t) && leq_theta(b, a, t)) CHECK(a == b);
    if (leq_theta(a, b, t) && leq_theta(b, c, t)) CHECK(leq_theta(a, c, t));
  }
}

TEST_CASE("r_theta") {
  const auto C = two_point();
  auto R = r_theta(C, kPi);
  REQUIRE(R.size() == 1);
  CHECK(R[0] == std::make_pair(0, 1));
  R = r_theta(C, 0.0);
  REQUIRE(R.size() == 1);
  CHECK(R[0] == std::make_pair(1, 0));
  CHECK(r_theta(C, 0.3).empty());
}

TEST_CASE("crossing angles") {
  auto a = crossing_angles(two_point(), 0.1);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(crossing_angles(ExponentSet({{"x", 1.0}}), 0.1).empty());
  const auto C = p2_exponents();
  a = crossing_angles(C, 0.1);
  CHECK(a.size() == 3);
  size_t total = 0;
  for (double t : a) {
    CHECK(r_theta(C, t).size() == 1);
    total += r_theta(C, t).size();
  }
  CHECK(total == 3);
}

TEST_CASE("crossing union is the strict order") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Exponent> e;
    for (int k = 0; k < 5; ++k) e.push_back({std::to_string(k), cplx(u(rng), u(rng))});
    const ExponentSet C(e);
    const double t0 = u(rng);
    if (!is_generic(t0, C, 1e-6)) continue;
    std::vector<std::pair<int, int>> uni;
    for (double t : crossing_angles(C, t0)) {
      CHECK(t < t0);
      CHECK(t > t0 - kPi);
      for (auto p : r_theta(C, t)) uni.push_back(p);
    }
    std::vector<std::pair<int, int>> want;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        if (i != j && lt_theta(C.value(i), C.value(j), t0 + kPi / 2)) want.emplace_back(i, j);
    std::sort(uni.begin(), uni.end());
    CHECK(uni == want);  // disjoint: sorted lists equal including multiplicity
  }
}

TEST_CASE("theta bullet: ray definition agrees with the two-case characterization") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3), a01(0, 1);
  int compared = 0;
  for (int trial = 0; compared < 10000; ++trial) {
    const ExponentSet C({{"x", cplx(u(rng), u(rng))}, {"y", cplx(u(rng), u(rng))}});
    const double t0 = u(rng);
    DirectionTuple t(t0, {t0 - 2 * kPi * a01(rng), t0 - 2 * kPi * a01(rng)});
    if (trial % 5 == 0) t.per_exponent[1] = t.per_exponent[0];
    if (!is_generic(t.per_exponent[0], C, 1e-6) || !is_generic(t.per_exponent[1], C, 1e-6)) continue;
    for (int i = 0; i < 2; ++i) CHECK(lt_theta_bullet(i, 1 - i, t, C) == lt_theta_bullet_cases(i, 1 - i, t, C));
    ++compared;
  }
}

TEST_CASE("theta bullet examples") {
  const double t0 = 0.1;
  const double T = 2 * std::sqrt(27.0);
  const ExponentSet C({{"o", 0.0}, {"k0", -T}, {"k1", T}});
  // opposite-pointing rays from 0 and -T, second angle slightly above t0 - pi
  DirectionTuple near(t0, {t0, t0 - kPi + 0.05, t0});
  CHECK(lt_theta_bullet(0, 1, near, C) == lt_theta_bullet_cases(0, 1, near, C));
  const DirectionTuple thm(t0, {t0, t0, t0 - kPi});
  CHECK(is_ordered(thm, C));
  CHECK(tau_theta_bullet(thm, C).seq == std::vector<int>{0, 1, 2});
  CHECK(is_ordered(DirectionTuple::constant(t0, 3), C));
  CHECK(tau_theta_bullet(DirectionTuple::constant(t0, 3), C).seq == tau_theta(C, t0).seq);
  CHECK_FALSE(is_ordered(DirectionTuple(t0, {t0, t0 + 0.1, t0}), C));
  CHECK_FALSE(is_ordered(DirectionTuple(t0, {t0, t0 - 2 * kPi, t0}), C));
  CHECK_FALSE(lt_theta_bullet(1, 1, thm, C));
}

}  // TEST_SUITE
