// One line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <fmt/format.h>

#include "oracles.hpp"
#include "stokes_mutant/dubrovin.hpp"
#include "stokes_mutant/subspace.hpp"

using namespace sm;

namespace {

const CompleteIntersection P1 = CompleteIntersection::projective(1);
const CompleteIntersection P2 = CompleteIntersection::projective(2);
const CompleteIntersection P3 = CompleteIntersection::projective(3);
const CompleteIntersection cubic3{4, {3}};

struct Line {
  bool ok = true;
  std::string detail;
  void need(bool cond, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
    ok = ok && cond;
  }
  void value(const std::string& name, double v, double tol) {
    need(v <= tol, fmt::format("{} {:.2e} <= {:.0e}", name, v, tol));
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<int> random_dims(std::mt19937_64& rng, int m, int max_dim = 8) {
  std::uniform_int_distribution<int> d(1, 3);
  for (;;) {
    std::vector<int> v(m);
    int n = 0;
    for (auto& x : v) n += (x = d(rng));
    if (n <= max_dim) return v;
  }
}

double cond(const CMat& A) {
  Eigen::JacobiSVD<CMat> svd(A);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

// Random data with cond(T), cond(f), cond(f*) <= 1e4; the raw generator has
// a tail near 1e6 where double rounding alone exceeds 1e-10.
constexpr double kMaxCond = 1e4;
StokesData conditioned_data(std::mt19937_64& rng, int m, int& rejected) {
  for (;;) {
    StokesData sd = random_stokes_data(rng, random_dims(rng, m));
    if (cond(sd.T) <= kMaxCond && cond(sd.f_matrix()) <= kMaxCond && cond(sd.fstar_matrix()) <= kMaxCond)
      return sd;
    ++rejected;
  }
}

CMat binomial_gram(int n) {
  CMat g = CMat::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = i; j <= n; ++j) g(i, j) = double(oracle::binom(n + j - i, n));
  return g;
}

CMat group(const StokesData& sd, const CMat& M, int c, bool cols) {
  int k = 0;
  for (int x : sd.tau.seq) {
    if (x == c) return cols ? CMat(M.middleCols(k, sd.block_dim(c))) : CMat(M.middleRows(k, sd.block_dim(c)));
    k += sd.block_dim(x);
  }
  return {};
}

// ---------------------------------------------------------------- criteria

Line braid_relations() {
  Line l;
  std::mt19937_64 rng(101);
  const auto t0 = Clock::now();
  double worst = 0;
  int count = 0, rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + trial % 3;
    const StokesData sd = conditioned_data(rng, m, rejected);
    for (int i = 1; i < m; ++i) {
      const auto si = BraidWord::parse(fmt::format("s{} s{}^-1", i, i), m);
      const auto sj = BraidWord::parse(fmt::format("s{}^-1 s{}", i, i), m);
      worst = std::max({worst, stokes_diff(apply_braid(sd, si), sd), stokes_diff(apply_braid(sd, sj), sd)});
      if (i + 1 < m)
        worst = std::max(worst, stokes_diff(apply_braid(sd, BraidWord::parse(fmt::format("s{0} s{1} s{0}", i, i + 1), m)),
                                            apply_braid(sd, BraidWord::parse(fmt::format("s{1} s{0} s{1}", i, i + 1), m))));
      for (int j = i + 2; j < m; ++j)
        worst = std::max(worst, stokes_diff(apply_braid(sd, BraidWord::parse(fmt::format("s{} s{}", i, j), m)),
                                            apply_braid(sd, BraidWord::parse(fmt::format("s{} s{}", j, i), m))));
    }
    ++count;
  }
  const double t = seconds_since(t0);
  l.value(fmt::format("{} data (cond <= 1e4, {} draws rejected), residual", count, rejected), worst, 1e-10);
  l.need(t < 30, fmt::format("{:.2f} s < 30 s", t));
  return l;
}

Line reduced_words() {
  Line l;
  std::mt19937_64 rng(102);
  const StokesData sd = random_stokes_data(rng, {2, 1, 2, 1});
  std::vector<int> p{0, 1, 2, 3};
  double worst = 0;
  int elements = 0, words = 0;
  do {
    const Permutation s{p};
    const StokesData ref = apply_braid(sd, reduced_word_lift(s));
    for (const auto& w : all_reduced_words(s)) {
      worst = std::max(worst, stokes_diff(apply_braid(sd, w), ref));
      ++words;
    }
    ++elements;
  } while (std::next_permutation(p.begin(), p.end()));
  l.need(elements == 24, fmt::format("{} elements, {} reduced words", elements, words));
  l.value("residual", worst, 1e-10);
  return l;
}

Line delta_identities() {
  Line l;
  std::mt19937_64 rng(103);
  double worst = 0, worst2 = 0;
  int rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const StokesData sd = conditioned_data(rng, 2 + trial % 3, rejected);
    const StokesData d = delta_action(sd), d2 = delta_action(d);
    const CMat Fsi = sd.fstar_matrix().inverse();
    const CMat Ti = sd.T.inverse();
    const CMat dfs = sd.Tc_sum() * sd.f_matrix().inverse() * Ti;
    for (int c = 0; c < sd.m(); ++c) {
      worst = std::max({worst, rel_diff(d.f[c], group(sd, Fsi, c, true)),
                        rel_diff(d.fstar[c], group(sd, dfs, c, false))});
      worst2 = std::max({worst2, rel_diff(d2.f[c], sd.T * sd.f[c] * sd.Tc[c].inverse()),
                         rel_diff(d2.fstar[c], sd.Tc[c] * sd.fstar[c] * Ti)});
    }
  }
  l.value(fmt::format("1000 data (cond <= 1e4, {} draws rejected), half twist", rejected), worst, 1e-10);
  l.value("full twist vs T f T_c^-1", worst2, 1e-10);
  return l;
}

Line factorization() {
  Line l;
  std::mt19937_64 rng(104);
  const double t0 = 0.1;
  const cplx w = std::polar(1.0, -2 * kPi / 3);
  const double T = 2 * std::sqrt(27.0);
  const ExponentSet p2({{"c0", -3.0}, {"c1", -3.0 * w}, {"c2", -3.0 * w * w}});
  const ExponentSet cub({{"o", 0.0}, {"k0", -T}, {"k1", T}});
  double worst = 0, least = 1e300;
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& [C, dims] : {std::pair{p2, std::vector<int>{1, 1, 1}}, std::pair{cub, std::vector<int>{4, 1, 1}}}) {
    const Ordering tau = tau_theta(C, t0);
    std::vector<int> off{0};
    for (int c : tau.seq) off.push_back(off.back() + dims[c]);
    const int n = off.back();
    for (int trial = 0; trial < 50; ++trial) {
      CMat g = CMat::Identity(n, n);
      for (size_t a = 0; a + 1 < off.size(); ++a)
        for (size_t b = 0; b < a; ++b)
          for (int i = off[a]; i < off[a + 1]; ++i)
            for (int j = off[b]; j < off[b + 1]; ++j) g(i, j) = cplx(u(rng), u(rng));
      const auto fac = factorize_stokes_multiplier(g, C, dims, t0);
      worst = std::max(worst, rel_diff(recompose(fac, n), g));
      for (size_t k = 0; k < fac.size(); ++k) {
        auto pert = fac;
        bool done = false;
        for (int i = 0; i < n && !done; ++i)
          for (int j = 0; j < n && !done; ++j)
            if (i != j && std::abs(pert[k].g(i, j)) > 0) {
              pert[k].g(i, j) += 1e-3;
              done = true;
            }
        if (done) least = std::min(least, (recompose(pert, n) - g).norm());
      }
    }
  }
  l.value("P2 and cubic geometries, recomposition", worst, 1e-10);
  l.need(least >= 1e-4, fmt::format("perturbation sensitivity {:.2e} >= 1e-4", least));
  return l;
}

Line euler_matrices() {
  Line l;
  double worst = 0;
  int mismatches = 0, samples = 0;
  for (int n = 1; n <= 6; ++n) {
    const CohomologyModel X(CompleteIntersection::projective(n));
    for (int i = 0; i <= n; ++i)
      for (int j = i; j <= n; ++j) {
        const cplx chi = euler_chi_pairing(X, i, j);
        const double want = double(oracle::binom(n + j - i, n));
        worst = std::max(worst, std::abs(chi - want) / std::max(1.0, want));
        mismatches += std::llround(chi.real()) != std::llround(want);
      }
  }
  for (const auto& ci : fano_complete_intersections(7)) {
    const CohomologyModel X(ci, false);
    ++samples;
    for (int i = 0; i < ci.index(); ++i)
      for (int j = 0; j < ci.index(); ++j) {
        const cplx chi = euler_chi_pairing(X, i, j);
        const auto want = oracle::chi_koszul(ci.N, ci.degrees, j - i);
        worst = std::max(worst, std::abs(chi - double(want)) / std::max(1.0, std::abs(double(want))));
        mismatches += std::llround(chi.real()) != want;
      }
  }
  l.value(fmt::format("P^1..P^6 and {} CI samples, residual", samples), worst, 1e-9);
  l.need(mismatches == 0, fmt::format("{} integer mismatches", mismatches));
  return l;
}

Line gamma_compatibility() {
  Line l;
  const auto res = resolve_gamma_convention({P2, P3, cubic3}, 1000, 105);
  l.need(res.unique, "auto-resolved " + res.selected.str());
  for (const auto& t : res.trials)
    if (t.choice.convention == res.selected.convention && t.choice.twist == res.selected.twist)
      l.value("1000 pairs each on P2, P3, cubic", t.worst_residual, 1e-9);
  // e^{pi i z} Gamma(1-z) Gamma(1+z) = 2 pi i z / (1 - e^{-2 pi i z})
  const int D = 8;
  const double gam = boost::math::constants::euler<double>();
  HPoly lp(D), lm(D), ez(D), q(D);
  lp[1] = -gam;
  lm[1] = gam;
  for (int k = 2; k <= D; ++k) {
    lp[k] = (k % 2 ? -1.0 : 1.0) * boost::math::zeta(double(k)) / k;
    lm[k] = boost::math::zeta(double(k)) / k;
  }
  ez[1] = kPi * kI;
  const HPoly lhs = ez.exp() * lm.exp() * lp.exp();
  double fact = 1;
  for (int j = 0; j <= D; ++j) {
    fact *= (j + 1);
    q[j] = std::pow(-2 * kPi * kI, j) / fact;
  }
  const HPoly rhs = q.inverse();
  double worst = 0;
  for (int j = 0; j <= D; ++j) worst = std::max(worst, std::abs(lhs[j] - rhs[j]) / std::max(1.0, std::abs(rhs[j])));
  l.value("series identity to degree 8", worst, 1e-12);
  return l;
}

Line stokes_p1() {
  Line l;
  const auto t0 = Clock::now();
  const QuantumData q(P1);
  AsymptoticSolver s(q, IntegratorConfig{}, Exec::parallel);
  const CMat G = gram_matrix(asymptotic_classes(s, 0.1).system());
  const double t = seconds_since(t0);
  l.value("Gram vs [[1,2],[0,1]]", gram_distance_up_to_signs(G, binomial_gram(1)), 1e-6);
  l.need(t < 10, fmt::format("{:.2f} s < 10 s", t));
  return l;
}

Line stokes_p2_p3() {
  Line l;
  auto t0 = Clock::now();
  {
    const QuantumData q(P2);
    AsymptoticSolver s(q, IntegratorConfig{}, Exec::parallel);
    const CMat G = gram_matrix(asymptotic_classes(s, 0.1).system());
    const double t = seconds_since(t0);
    l.value("P2 Gram at 0.1 vs binomial", gram_distance_up_to_signs(G, binomial_gram(2)), 1e-4);
    l.need(t < 60, fmt::format("{:.2f} s < 60 s", t));
  }
  t0 = Clock::now();
  {
    // constant directions give mutated helices on P3; the binomial order
    // O(0) < ... < O(3) is the one of the center tuple
    const QuantumData q(P3);
    AsymptoticSolver s(q, IntegratorConfig{}, Exec::parallel);
    const auto t = center_tuple(q.exponents, q.r, 0.1);
    const CMat G = gram_matrix(asymptotic_classes(s, t).system());
    const double secs = seconds_since(t0);
    l.value("P3 Gram at the center tuple vs binomial", gram_distance_up_to_signs(G, binomial_gram(3)), 1e-3);
    l.need(secs < 300, fmt::format("{:.2f} s < 300 s", secs));
  }
  return l;
}

Line gamma_conjecture() {
  Line l;
  for (const auto& [ci, tol] : {std::pair{P1, 1e-6}, std::pair{P2, 1e-4}, std::pair{P3, 1e-4}, std::pair{cubic3, 1e-3}}) {
    const QuantumData q(ci);
    AsymptoticSolver s(q, IntegratorConfig{}, Exec::parallel);
    l.value(ci.name() + " angle", gamma_conjecture_angle(s), tol);
  }
  return l;
}

Line dubrovin() {
  Line l;
  DubrovinOptions opt;
  opt.tol_cmp = 1e-3;
  opt.tol_residual = 1e-8;
  for (const auto& ci : {P1, P2, P3, cubic3}) {
    const auto rep = dubrovin_check(ci, opt);
    l.need(rep.verdict, fmt::format("{} {} (worst {:.1e}, Gram {:.1e})", ci.name(), rep.verdict ? "pass" : "fail",
                                    rep.worst_distance(), rep.gram_distance));
    if (ci.index() < ci.dim() + 1) l.value("residual agreement", rep.residual_consistency, 1e-8);
  }
  return l;
}

Line direction_change() {
  Line l;
  const QuantumData q(P2);
  AsymptoticSolver s(q, IntegratorConfig{}, Exec::parallel);
  const auto a = asymptotic_classes(s, 0.1);
  double worst = 0;
  bool orders = true;
  for (double to : {-0.7, -2.5, 1.2}) {
    const auto b = asymptotic_classes(s, to);
    const MutationSystem moved = apply_braid(a.system(), reindex_word(q.exponents, 0.1, to));
    orders = orders && moved.tau == b.tau;
    for (int c = 0; c < q.exponents.size(); ++c) worst = std::max(worst, subspace_distance(moved.f[c], b.blocks[c]));
  }
  l.need(orders, "P2, 0.1 to -0.7, -2.5, 1.2");
  l.value("subspace distance", worst, 1e-4);
  return l;
}

Line gauge_symmetry() {
  Line l;
  double sym = 0;
  bool gauge = true;
  for (const auto& ci : {P1, P2, P3, cubic3}) {
    const QuantumData q(ci);
    const Report r = gauge_symmetry_check(q, 106);
    gauge = gauge && r.ok();
    for (const auto& c : r.clauses) sym = std::max(sym, c.residual);
  }
  l.need(gauge, fmt::format("gauge and eigenspace transport, worst {:.2e} <= 1e-10", sym));
  double worst = 0;
  for (const auto& ci : {P1, P2, P3, cubic3}) {
    const QuantumData q(ci);
    worst = std::max(worst, series_symmetry_residual(q, fundamental_series(q, 20)));
  }
  l.value("series symmetry through order 20", worst, 1e-10);
  return l;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Line()>>> criteria{
      {"braid relations", braid_relations},
      {"reduced words over S4", reduced_words},
      {"half and full twist", delta_identities},
      {"Stokes multiplier factorization", factorization},
      {"Euler matrices", euler_matrices},
      {"Gamma pairing compatibility", gamma_compatibility},
      {"Stokes matrix of P1", stokes_p1},
      {"Stokes matrices of P2 and P3", stokes_p2_p3},
      {"Gamma conjecture I", gamma_conjecture},
      {"Dubrovin-type check", dubrovin},
      {"direction change", direction_change},
      {"gauge and symmetry", gauge_symmetry},
  };
  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Line l;
    try {
      l = criteria[k].second();
    } catch (const std::exception& e) {
      l.need(false, std::string("error: ") + e.what());
    }
    failures += !l.ok;
    std::cout << fmt::format("[{}] {:>2}. {}: {}\n", l.ok ? "PASS" : "FAIL", k + 1, criteria[k].first, l.detail)
              << std::flush;
  }
  return failures;
}
