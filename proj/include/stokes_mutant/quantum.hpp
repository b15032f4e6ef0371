#pragma once

#include <cstdint>
#include <map>

#include "stokes_mutant/cohomology.hpp"
#include "stokes_mutant/mutation.hpp"

namespace sm {

struct IntegratorConfig {
  double rtol = 1e-10;
  double atol = 1e-13;
  int order = 20;              // formal order M at the matching radius
  double outer_factor = 10.0;  // R = outer_factor * max|c|
  int series_order = 0;        // fundamental series order, 0 = automatic
  double cond_limit = 1e10;    // frame conditioning at R
};

enum class Exec { serial, parallel };

// Cap from STOKES_MUTANT_THREADS, otherwise the OpenMP default.
int thread_cap();

// c1 * on the ambient basis 1, x, ..., x^d.
CMat quantum_ring_matrix(const CompleteIntersection& ci, cplx q);

// Columns: the quantum powers x^j = H*...*H (q = 1) in the classical basis
// H^0..H^d, read off from the polynomial part of the Birkhoff factorization
// of the I-function D-module. Needs r_X >= 2 (no mirror map).
CMat quantum_powers(const CompleteIntersection& ci);

struct QuantumData {
  CompleteIntersection ci;
  CohomologyModel X;
  CMat U, mu, rho;
  ExponentSet exponents;          // -C_X; ids k0..k{r-1}, then "o" for 0
  std::vector<int> multiplicity;  // algebraic, per exponent
  double T = 0.0;
  int r = 0;

  explicit QuantumData(const CompleteIntersection& ci);
  int dim() const { return X.n; }
  int zero_index() const;  // -1 when 0 is not an exponent
  cplx omega(int k) const;  // exp(-2 pi i k / r)
};

ExponentSet exponents(const CompleteIntersection& ci);

struct Spectrum {
  std::vector<cplx> values;
  std::vector<int> mult;
};
Spectrum numeric_spectrum(const CMat& U, double cluster_tol = 1e-8);
CMat generalized_eigenspace(const CMat& U, cplx lambda, int mult);

Report property_O_check(const QuantumData& q);
Report gauge_symmetry_check(const QuantumData& q, std::uint64_t seed = 7);

struct FundamentalSeries {
  std::vector<CMat> S;  // S[0] = id
  double worst_residual = 0.0;
  double worst_obstruction = 0.0;

  int order() const { return static_cast<int>(S.size()) - 1; }
  CMat eval(cplx z) const;  // sum S_n z^{-n}
};

FundamentalSeries fundamental_series(const CMat& U, const CMat& mu, const CMat& rho, int N,
                                     double tol = 1e-12);
FundamentalSeries fundamental_series(const QuantumData& q, int N);
// (S(-z)a, S(z)b) = (a, b) coefficientwise.
double series_pairing_residual(const FundamentalSeries& fs, const CMat& gram);
// T(z / omega_k) = T(z) coefficientwise, all k.
double series_symmetry_residual(const QuantumData& q, const FundamentalSeries& fs);

// e^{c/z} z^lambda (w_0 + w_1 z + ... + w_M z^M) for a simple eigenvalue u = -c.
struct FormalSolution {
  cplx c, u, lambda;
  std::vector<CVec> w;

  // z^lambda sum w_k z^k with log z = ln r + i arg
  CVec scaled(double r, double arg) const;
  double residual(double r, double arg, const CMat& U, const CMat& mu) const;
};
FormalSolution formal_solution(const CMat& U, const CMat& mu, cplx c, int M);

struct RayJob {
  double theta = 0.0;
  double r0 = 0.0, r1 = 1.0;
  cplx u = 0.0;  // W = e^{u/z} Y
  CVec w0;
  std::vector<double> samples;  // radii in (r0, r1] to record
};
struct RayResult {
  CVec w1;
  std::vector<CVec> samples;
  std::size_t evals = 0;  // right-hand side evaluations
};

RayResult integrate_ray(const CMat& U, const CMat& mu, const RayJob& job,
                        const IntegratorConfig& cfg);
std::vector<RayResult> integrate_rays(const CMat& U, const CMat& mu,
                                      const std::vector<RayJob>& jobs,
                                      const IntegratorConfig& cfg, Exec exec);

// Q(s, t) = (s(-z), t(z)) for seeds of one exponent on opposite rays; the
// worst relative change over the samples.
double flat_pairing_drift(const QuantumData& q, int c, double theta, const IntegratorConfig& cfg);

// Flat sections seeded at the nonzero exponents, turned into classes.
class AsymptoticSolver {
 public:
  AsymptoticSolver(const QuantumData& q, IntegratorConfig cfg, Exec exec);

  const QuantumData& data() const { return q_; }
  const IntegratorConfig& config() const { return cfg_; }
  double matching_radius(int c) const;
  double outer_radius() const { return R_; }

  // class of the solution seeded at c on the ray of (unreduced) angle theta
  CVec ray_class(int c, double theta);
  // span of solutions of growth at most e^{c/z} on the ray theta
  CMat flag(int c, double theta);
  // Im f_{theta0, c}
  CMat image(int c, double theta0);

  // run every integration that image(c, theta) will need, as one batch
  void prefetch(const std::vector<std::pair<int, double>>& images);
  std::size_t integrations() const { return cache_.size(); }

 private:
  struct Route {
    bool whole = false;
    bool dual = false;
    double ray = 0.0;
    std::vector<int> seeds;
  };
  Route route(int c, double theta) const;
  std::pair<int, long long> key(int c, double theta) const;
  CVec class_of(const CVec& y, double theta) const;

  const QuantumData& q_;
  IntegratorConfig cfg_;
  Exec exec_;
  double R_ = 1.0;
  FundamentalSeries fs_;
  CMat dual_pairing_;  // beta^T M alpha = (e^{-pi i mu} e^{pi i rho} beta, alpha) / (2 pi)^d
  std::map<std::pair<int, long long>, CVec> cache_;  // y(R) per geometric ray
};

struct AsymptoticFrame {
  ExponentSet C;
  DirectionTuple tuple;  // constant for a single direction
  bool single = true;
  Ordering tau;
  std::vector<CMat> blocks;  // per exponent index
  CMat P;                    // pairing [.,.)
  std::vector<int> grading;
  IntegratorConfig cfg;
  double R = 0.0;
  std::vector<double> matching;  // per exponent, 0 for the zero block

  MutationSystem system() const;
};

AsymptoticFrame asymptotic_classes(AsymptoticSolver& s, double theta0);
AsymptoticFrame asymptotic_classes(AsymptoticSolver& s, const DirectionTuple& t);

// Two-sided orthogonal complement under P of the other blocks, split by tau.
CMat extract_zero_block(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau,
                        int zero, const std::vector<int>& parity, int expected_dim);

// Scale a line to [a, a) = 1; the sign makes Re[a, target) > 0 if a target is
// given, otherwise the first nonzero coordinate has positive real part.
CVec normalize_line(const CVec& a, const CMat& P, const CVec* target = nullptr);

// Angle between the class of the most recessive solution on arg z = 0 and
// C * Gamma-hat.
double gamma_conjecture_angle(AsymptoticSolver& s);

}  // namespace sm
