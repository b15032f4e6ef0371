#include "stokes_mutant/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>
#include <omp.h>

#include "stokes_mutant/subspace.hpp"

namespace sm {

namespace odeint = boost::numeric::odeint;

int thread_cap() {
  if (const char* s = std::getenv("STOKES_MUTANT_THREADS")) {
    const int k = std::atoi(s);
    if (k > 0) return k;
  }
  return omp_get_max_threads();
}

// ------------------------------------------------------------ ring

static std::vector<cplx> relation(const CompleteIntersection& ci, cplx q) {
  // coefficients a_0..a_{d+1} of the monic relation, a_{d+1} = 1
  const int d = ci.dim(), r = ci.index();
  std::vector<cplx> a(d + 2, 0.0);
  if (r >= 2 || ci.is_projective_space()) {
    a[d + 1] = 1.0;
    a[d + 1 - r] -= ci.D() * std::pow(q, r);
    return a;
  }
  // (x + D' q)^d (x - (D - D') q)
  std::vector<cplx> p{1.0};
  auto times = [&](cplx root) {  // multiply by (x - root)
    std::vector<cplx> out(p.size() + 1, 0.0);
    for (size_t i = 0; i < p.size(); ++i) {
      out[i + 1] += p[i];
      out[i] -= root * p[i];
    }
    p = out;
  };
  for (int i = 0; i < d; ++i) times(-ci.Dprime() * q);
  times((ci.D() - ci.Dprime()) * q);
  return p;
}

CMat quantum_ring_matrix(const CompleteIntersection& ci, cplx q) {
  const int d = ci.dim();
  const auto a = relation(ci, q);
  CMat x = CMat::Zero(d + 1, d + 1);
  for (int j = 0; j < d; ++j) x(j + 1, j) = 1.0;
  for (int i = 0; i <= d; ++i) x(i, d) = -a[i];
  return x * double(ci.index());
}

// Coefficient matrices of Phi_d = sum over columns j of (H + d z)^j A_d(z),
// A_d = prod_i prod_{k<=d_i d}(d_i H + k z) / prod_{k<=d}(H + k z)^{N+1}.
// Entry (a, j) carries the single power z^{j - a - r d}.
static CMat i_function_block(const CompleteIntersection& ci, int deg) {
  const int d = ci.dim();
  HPoly num = HPoly::one(d), den = HPoly::one(d);
  for (int di : ci.degrees)
    for (int k = 1; k <= di * deg; ++k) num = num * HPoly(d, {double(k), double(di)});
  for (int k = 1; k <= deg; ++k)
    for (int e = 0; e <= ci.N; ++e) den = den * HPoly(d, {double(k), 1.0});
  const HPoly a = num * den.inverse();
  CMat out = CMat::Zero(d + 1, d + 1);
  HPoly shift = HPoly::one(d);
  for (int j = 0; j <= d; ++j) {
    const HPoly col = shift * a;
    for (int i = 0; i <= d; ++i) out(i, j) = col[i];
    shift = shift * HPoly(d, {double(deg), 1.0});
  }
  return out;
}

CMat quantum_powers(const CompleteIntersection& ci) {
  const int d = ci.dim(), r = ci.index();
  if (r < 2 && !ci.is_projective_space())
    fail(ErrorKind::precondition, "quantum powers need r_X >= 2 (mirror map is trivial only then)");
  const int top = d / r;
  std::vector<CMat> L{CMat::Identity(d + 1, d + 1)}, V{CMat::Identity(d + 1, d + 1)};
  CMat Q = CMat::Identity(d + 1, d + 1);
  for (int g = 1; g <= top; ++g) {
    CMat R = i_function_block(ci, g);
    for (int a = 1; a < g; ++a) R -= L[a] * V[g - a];
    CMat Lg = CMat::Zero(d + 1, d + 1), Vg = CMat::Zero(d + 1, d + 1);
    for (int i = 0; i <= d; ++i)
      for (int j = 0; j <= d; ++j) {
        const int zpow = j - i - r * g;
        (zpow < 0 ? Lg : Vg)(i, j) = R(i, j);
        if (zpow == 0) Q(i, j) += R(i, j);
      }
    L.push_back(Lg);
    V.push_back(Vg);
  }
  return Q;
}

ExponentSet exponents(const CompleteIntersection& ci) {
  const int r = ci.index();
  std::vector<Exponent> e;
  if (r >= 2 || ci.is_projective_space()) {
    const double T = r * std::pow(ci.D(), 1.0 / r);
    for (int k = 0; k < r; ++k)
      e.push_back({fmt::format("k{}", k), -T * std::exp(-2.0 * kPi * kI * double(k) / double(r))});
    if (ci.dim() + 1 - r > 0 || primitive_dim(ci) > 0) e.push_back({"o", 0.0});
  } else {
    e.push_back({"k0", -(ci.D() - ci.Dprime())});
    e.push_back({"m", ci.Dprime()});
    if (primitive_dim(ci) > 0) e.push_back({"o", 0.0});
  }
  return ExponentSet(e);
}

QuantumData::QuantumData(const CompleteIntersection& c) : ci(c), X(c, true) {
  const int n = X.n, d = X.d;
  r = ci.index();
  U = CMat::Zero(n, n);
  const CMat Q = quantum_powers(ci);
  U.topLeftCorner(d + 1, d + 1) = Q * quantum_ring_matrix(ci, 1.0) * Q.inverse();
  mu = X.mu();
  rho = X.rho();
  exponents = sm::exponents(ci);
  for (int i = 0; i < exponents.size(); ++i) T = std::max(T, std::abs(exponents.value(i)));
  multiplicity.assign(exponents.size(), 1);
  if (int z = zero_index(); z >= 0) {
    multiplicity[z] = (r >= 2 || ci.is_projective_space()) ? d + 1 - r + X.b : X.b;
  }
  if (r == 1 && !ci.is_projective_space()) multiplicity[exponents.index_of("m")] = d;
}

int QuantumData::zero_index() const {
  for (int i = 0; i < exponents.size(); ++i)
    if (exponents[i].id == "o") return i;
  return -1;
}

cplx QuantumData::omega(int k) const { return std::exp(-2.0 * kPi * kI * double(k) / double(r)); }

// ------------------------------------------------------------ spectrum

Spectrum numeric_spectrum(const CMat& U, double cluster_tol) {
  Eigen::ComplexEigenSolver<CMat> es(U, false);
  const double scale = std::max(1.0, U.norm());
  Spectrum s;
  std::vector<std::vector<cplx>> members;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const cplx l = es.eigenvalues()(i);
    bool placed = false;
    for (size_t k = 0; k < members.size() && !placed; ++k)
      if (std::abs(l - members[k][0]) <= cluster_tol * scale) {
        members[k].push_back(l);
        placed = true;
      }
    if (!placed) members.push_back({l});
  }
  for (auto& m : members) {
    cplx sum = 0;
    for (auto v : m) sum += v;
    s.values.push_back(sum / double(m.size()));
    s.mult.push_back(static_cast<int>(m.size()));
  }
  return s;
}

CMat generalized_eigenspace(const CMat& U, cplx lambda, int mult) {
  const int n = static_cast<int>(U.rows());
  const CMat A = U - lambda * CMat::Identity(n, n);
  CMat P = CMat::Identity(n, n);
  for (int k = 0; k < mult; ++k) P = P * A;
  // the kernel dimension is known; take the right singular vectors for it
  Eigen::JacobiSVD<CMat> svd(P, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(mult);
}

static CMat pow_mu(const CMat& mu, cplx logq) {
  CMat e = CMat::Zero(mu.rows(), mu.cols());
  for (int i = 0; i < mu.rows(); ++i) e(i, i) = std::exp(mu(i, i) * logq);
  return e;
}

Report property_O_check(const QuantumData& q) {
  Report rep;
  const Spectrum s = numeric_spectrum(q.U);
  double T = 0;
  for (auto v : s.values) T = std::max(T, std::abs(v));
  double in_spec = 1.0;
  int multT = 0;
  for (size_t k = 0; k < s.values.size(); ++k) {
    const double dist = std::abs(s.values[k] - T) / T;
    if (dist < in_spec) {
      in_spec = dist;
      multT = s.mult[k];
    }
  }
  rep.add("T_X is an eigenvalue", in_spec, 1e-8);
  double rot = 0;
  for (auto v : s.values) {
    if (std::abs(v) < T * (1 - 1e-8)) continue;
    double best = 1e300;
    for (int k = 0; k < q.r; ++k) best = std::min(best, std::abs(v - T * q.omega(k)) / T);
    rot = std::max(rot, best);
  }
  rep.add("max-modulus eigenvalues are omega_k T_X", rot, 1e-8);
  rep.add("multiplicity of T_X is one", multT == 1 ? 0.0 : 1.0, 0.5);
  const CMat E = generalized_eigenspace(q.U, T, 1);
  rep.add("dim E(T_X) = 1 (eigen residual)", (q.U * E - T * E).norm() / T, 1e-8);
  rep.add("T_X = r D^(1/r)", std::abs(T - q.T) / q.T, 1e-8);
  // analytic spectrum with multiplicities against the numerical clusters
  double miss = 0;
  for (int c = 0; c < q.exponents.size(); ++c) {
    const cplx u = -q.exponents.value(c);
    int found = 0;
    for (size_t k = 0; k < s.values.size(); ++k)
      if (std::abs(s.values[k] - u) <= 1e-6 * std::max(1.0, q.T)) found += s.mult[k];
    if (found != q.multiplicity[c]) miss = 1.0;
  }
  rep.add("spectrum and multiplicities match -C_X", miss, 0.5);
  return rep;
}

Report gauge_symmetry_check(const QuantumData& q, std::uint64_t seed) {
  Report rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> rad(0.5, 2.0), ang(-kPi, kPi);
  const int d = q.X.d;
  CMat mu_amb = q.mu.topLeftCorner(d + 1, d + 1);
  const CMat M1 = quantum_ring_matrix(q.ci, 1.0);
  double worst = 0;
  for (int t = 0; t < 8; ++t) {
    const cplx qq = std::polar(rad(rng), ang(rng));
    const cplx lq = std::log(qq);
    const CMat lhs = pow_mu(mu_amb, lq) * quantum_ring_matrix(q.ci, qq) * pow_mu(mu_amb, -lq);
    worst = std::max(worst, rel_diff(lhs, qq * M1));
  }
  rep.add("q^mu (c1 *_q) q^-mu = q (c1 *_0)", worst, 1e-12);
  double sym = 0;
  for (int k = 1; k < q.r; ++k) {
    const CMat W = pow_mu(q.mu, -std::log(q.omega(k)));
    for (int c = 0; c < q.exponents.size(); ++c) {
      const cplx u = -q.exponents.value(c);
      const CMat E = generalized_eigenspace(q.U, u, q.multiplicity[c]);
      const CMat F = generalized_eigenspace(q.U, q.omega(k) * u, q.multiplicity[c]);
      sym = std::max(sym, subspace_distance(W * E, F));
    }
  }
  rep.add("omega_k^-mu E(c) = E(omega_k c)", sym, 1e-10);
  if (!rep.ok()) fail(ErrorKind::numerical, "model inconsistency: " + rep.text());
  return rep;
}

// ------------------------------------------------------------ series at infinity

CMat FundamentalSeries::eval(cplx z) const {
  const cplx w = 1.0 / z;
  CMat acc = S.back();
  for (int n = order() - 1; n >= 0; --n) acc = S[n] + w * acc;
  return acc;
}

FundamentalSeries fundamental_series(const CMat& U, const CMat& mu, const CMat& rho, int N,
                                     double tol) {
  if (N < 1) fail(ErrorKind::precondition, "series order must be at least 1");
  const int n = static_cast<int>(U.rows());
  FundamentalSeries fs;
  fs.S.push_back(CMat::Identity(n, n));
  for (int k = 1; k <= N; ++k) {
    const CMat rhs = U * fs.S.back() - fs.S.back() * rho;
    const double scale = std::max(1.0, rhs.norm());
    CMat Sk = CMat::Zero(n, n);
    double obst = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double den = (mu(i, i) - mu(j, j)).real() - k;
        if (std::abs(den) < 1e-12)
          obst = std::max(obst, std::abs(rhs(i, j)) / scale);
        else
          Sk(i, j) = rhs(i, j) / den;
      }
    const CMat res = mu * Sk - Sk * mu - double(k) * Sk - rhs;
    fs.worst_residual = std::max(fs.worst_residual, res.norm() / scale);
    fs.worst_obstruction = std::max(fs.worst_obstruction, obst);
    if (obst > tol)
      fail(ErrorKind::numerical,
           fmt::format("fundamental solution recursion obstructed at order {} ({:.3e})", k, obst));
    fs.S.push_back(Sk);
  }
  return fs;
}

FundamentalSeries fundamental_series(const QuantumData& q, int N) {
  return fundamental_series(q.U, q.mu, q.rho, N);
}

double series_pairing_residual(const FundamentalSeries& fs, const CMat& gram) {
  double worst = 0;
  const int N = fs.order();
  for (int k = 1; k <= N; ++k) {
    CMat acc = CMat::Zero(gram.rows(), gram.cols());
    double scale = 0;
    for (int p = 0; p <= k; ++p) {
      const double sgn = (p % 2) ? -1.0 : 1.0;
      acc += sgn * fs.S[p].transpose() * gram * fs.S[k - p];
      scale += fs.S[p].norm() * fs.S[k - p].norm();
    }
    worst = std::max(worst, acc.norm() / std::max(1.0, scale * gram.norm()));
  }
  return worst;
}

double series_symmetry_residual(const QuantumData& q, const FundamentalSeries& fs) {
  double worst = 0;
  const int n = q.dim();
  for (int k = 1; k < q.r; ++k) {
    const double phase = 2.0 * kPi * k / q.r;  // omega^{-x} = e^{i phase x}
    for (int p = 0; p <= fs.order(); ++p) {
      const double scale = std::max(1.0, fs.S[p].cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double x = (q.mu(i, i) - q.mu(j, j)).real() - p;
          const cplx f = 1.0 - std::exp(kI * phase * x);
          worst = std::max(worst, std::abs(fs.S[p](i, j) * f) / scale);
        }
    }
  }
  return worst;
}

// ------------------------------------------------------------ formal solutions at 0

CVec FormalSolution::scaled(double r, double arg) const {
  const cplx z = std::polar(r, arg);
  CVec acc = w.back();
  for (int k = static_cast<int>(w.size()) - 2; k >= 0; --k) acc = w[k] + z * acc;
  return std::exp(lambda * cplx(std::log(r), arg)) * acc;
}

double FormalSolution::residual(double r, double arg, const CMat& U, const CMat& mu) const {
  // (U - u) w - z (lambda + mu) w - z^2 w'
  const cplx z = std::polar(r, arg);
  const int n = static_cast<int>(U.rows());
  CVec val = CVec::Zero(n), der = CVec::Zero(n);
  cplx zk = 1.0;
  for (size_t k = 0; k < w.size(); ++k) {
    val += zk * w[k];
    if (k + 1 < w.size()) der += double(k + 1) * zk * w[k + 1];
    zk *= z;
  }
  const CMat A = U - u * CMat::Identity(n, n);
  const CVec res = A * val - z * (lambda * val + mu * val) - z * z * der;
  return res.norm() / (std::max(1.0, A.norm()) * val.norm());
}

FormalSolution formal_solution(const CMat& U, const CMat& mu, cplx c, int M) {
  const int n = static_cast<int>(U.rows());
  FormalSolution fs;
  fs.c = c;
  fs.u = -c;
  const CMat A = U - fs.u * CMat::Identity(n, n);
  const double scale = std::max(1.0, U.norm());
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) > 1e-8 * scale) fail(ErrorKind::precondition, "exponent is not an eigenvalue");
  if (n > 1 && sv(n - 2) <= 1e-8 * scale)
    fail(ErrorKind::precondition, "unsupported block: multiple eigenvalue");
  CVec v = svd.matrixV().col(n - 1);
  const CVec l = svd.matrixU().col(n - 1).conjugate();  // l^T A = 0
  int lead = 0;
  while (std::abs(v(lead)) < 1e-12) ++lead;
  v *= std::abs(v(lead)) / v(lead);
  const cplx lv2 = (l.transpose() * v)(0);
  if (std::abs(lv2) < 1e-8) fail(ErrorKind::precondition, "unsupported block: eigenvalue not semisimple");
  const CMat Pi = v * l.transpose() / lv2;
  const auto K = (A + Pi).partialPivLu();
  const CMat proj = CMat::Identity(n, n) - Pi;
  fs.lambda = -(l.transpose() * mu * v)(0) / lv2;
  fs.w.push_back(v);
  for (int k = 1; k <= M; ++k) {
    const CVec y = mu * fs.w.back() + (fs.lambda + double(k - 1)) * fs.w.back();
    const CVec p = proj * K.solve(y);
    const cplx alpha = -(l.transpose() * mu * p)(0) / (double(k) * lv2);
    fs.w.push_back(p + alpha * v);
  }
  return fs;
}

// ------------------------------------------------------------ ray integration

namespace {

using State = std::vector<cplx>;

struct RaySystem {
  const CMat& U;
  const CMat& mu;
  cplx u;
  double theta;
  std::size_t* evals;
  void operator()(const State& x, State& dx, double t) const {
    const int n = static_cast<int>(x.size());
    const cplx z = std::polar(std::exp(t), theta);
    Eigen::Map<const CVec> X(x.data(), n);
    Eigen::Map<CVec> D(dx.data(), n);
    D = (U * X - u * X) / z - mu * X;
    ++*evals;
  }
};

}  // namespace

RayResult integrate_ray(const CMat& U, const CMat& mu, const RayJob& job,
                        const IntegratorConfig& cfg) {
  if (!(job.r0 > 0 && job.r1 > job.r0)) fail(ErrorKind::precondition, "need 0 < r0 < r1");
  const int n = static_cast<int>(U.rows());
  RayResult res;
  State x(job.w0.data(), job.w0.data() + n);
  std::vector<double> times{std::log(job.r0)};
  for (double s : job.samples) times.push_back(std::log(s));
  times.push_back(std::log(job.r1));
  std::vector<CVec> seen;
  auto observer = [&](const State& s, double) {
    seen.push_back(Eigen::Map<const CVec>(s.data(), n));
  };
  RaySystem sys{U, mu, job.u, job.theta, &res.evals};
  auto stepper = odeint::make_controlled(cfg.atol, cfg.rtol, odeint::runge_kutta_fehlberg78<State>());
  try {
    odeint::integrate_times(stepper, sys, x, times.begin(), times.end(),
                            (times.back() - times.front()) / 200.0, observer,
                            odeint::max_step_checker(2000000));
  } catch (const std::exception& e) {
    fail(ErrorKind::numerical,
         fmt::format("ray integration failed at theta={:.6f}, r0={:.4g}: {}", job.theta, job.r0,
                     e.what()));
  }
  res.w1 = Eigen::Map<const CVec>(x.data(), n);
  for (size_t k = 1; k + 1 < seen.size(); ++k) res.samples.push_back(seen[k]);
  return res;
}

std::vector<RayResult> integrate_rays(const CMat& U, const CMat& mu,
                                      const std::vector<RayJob>& jobs,
                                      const IntegratorConfig& cfg, Exec exec) {
  const int m = static_cast<int>(jobs.size());
  std::vector<RayResult> out(m);
  if (exec == Exec::serial) {
    for (int j = 0; j < m; ++j) out[j] = integrate_ray(U, mu, jobs[j], cfg);
    return out;
  }
  std::vector<std::exception_ptr> errs(m);
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
  for (int j = 0; j < m; ++j) {
    try {
      out[j] = integrate_ray(U, mu, jobs[j], cfg);
    } catch (...) {
      errs[j] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

static double gap(const ExponentSet& C, int c) {
  double g = 1e300;
  for (int i = 0; i < C.size(); ++i)
    if (i != c) g = std::min(g, std::abs(C.value(i) - C.value(c)));
  return g;
}

static double max_modulus(const ExponentSet& C) {
  double t = 0;
  for (int i = 0; i < C.size(); ++i) t = std::max(t, std::abs(C.value(i)));
  return t;
}

double flat_pairing_drift(const QuantumData& q, int c, double theta, const IntegratorConfig& cfg) {
  const double r0 = gap(q.exponents, c) / cfg.order;
  const double R = cfg.outer_factor * max_modulus(q.exponents);
  const FormalSolution f = formal_solution(q.U, q.mu, q.exponents.value(c), cfg.order);
  std::vector<double> samples;
  for (int k = 1; k < 24; ++k) samples.push_back(r0 * std::pow(R / r0, k / 24.0));
  std::vector<RayJob> jobs(2);
  for (int s = 0; s < 2; ++s) {
    jobs[s].theta = theta + s * kPi;
    jobs[s].r0 = r0;
    jobs[s].r1 = R;
    jobs[s].u = f.u;
    jobs[s].w0 = f.scaled(r0, jobs[s].theta);
    jobs[s].samples = samples;
  }
  const auto res = integrate_rays(q.U, q.mu, jobs, cfg, Exec::serial);
  std::vector<CVec> S = res[1].samples, T = res[0].samples;
  S.push_back(res[1].w1);
  T.push_back(res[0].w1);
  std::vector<cplx> Q;
  double scale = 0;
  for (size_t k = 0; k < S.size(); ++k) {
    Q.push_back((S[k].transpose() * q.X.gram * T[k])(0));
    scale = std::max(scale, S[k].norm() * T[k].norm() * q.X.gram.norm());
  }
  double drift = 0;
  for (auto v : Q) drift = std::max(drift, std::abs(v - Q.front()) / scale);
  return drift;
}

// ------------------------------------------------------------ asymptotic classes

AsymptoticSolver::AsymptoticSolver(const QuantumData& q, IntegratorConfig cfg, Exec exec)
    : q_(q), cfg_(cfg), exec_(exec) {
  R_ = cfg_.outer_factor * max_modulus(q_.exponents);
  int N = cfg_.series_order > 0 ? cfg_.series_order : 40;
  fs_ = fundamental_series(q_, N);
  if (cfg_.series_order <= 0) {
    // grow until the tail is below double precision at R
    while (fs_.S.back().norm() * std::pow(R_, -fs_.order()) > 1e-17 && N < 640) {
      N *= 2;
      fs_ = fundamental_series(q_, N);
    }
  }
  const CMat E = pow_mu(q_.mu, -kPi * kI) * q_.X.exp_rho(kPi * kI);
  dual_pairing_ = E.transpose() * q_.X.gram / std::pow(2 * kPi, q_.X.d);
}

double AsymptoticSolver::matching_radius(int c) const { return gap(q_.exponents, c) / cfg_.order; }

std::pair<int, long long> AsymptoticSolver::key(int c, double theta) const {
  double t = std::fmod(theta, 2 * kPi);
  if (t < 0) t += 2 * kPi;
  long long k = std::llround(t * 1e9);
  if (k == std::llround(2 * kPi * 1e9)) k = 0;
  return {c, k};
}

CVec AsymptoticSolver::class_of(const CVec& y, double theta) const {
  const cplx lz(std::log(R_), theta);
  const cplx z = std::exp(lz);
  CVec a = fs_.eval(z).partialPivLu().solve(y);
  a = pow_mu(q_.mu, lz) * a;
  a = q_.X.exp_rho(-lz) * a;
  return a * std::pow(2 * kPi, q_.X.d / 2.0);
}

AsymptoticSolver::Route AsymptoticSolver::route(int c, double theta) const {
  const auto& C = q_.exponents;
  const int z = q_.zero_index();
  Route rt;
  std::vector<int> below, above;
  for (int i = 0; i < C.size(); ++i) {
    if (leq_theta(C.value(i), C.value(c), theta))
      below.push_back(i);
    else
      above.push_back(i);
  }
  if (above.empty()) {
    rt.whole = true;
    return rt;
  }
  const bool zero_below = z >= 0 && std::find(below.begin(), below.end(), z) != below.end();
  if (!zero_below) {
    rt.ray = theta;
    rt.seeds = below;
  } else {
    rt.dual = true;
    rt.ray = theta + kPi;
    rt.seeds = above;
  }
  return rt;
}

CVec AsymptoticSolver::ray_class(int c, double theta) {
  auto k = key(c, theta);
  auto it = cache_.find(k);
  if (it == cache_.end()) {
    const FormalSolution f = formal_solution(q_.U, q_.mu, q_.exponents.value(c), cfg_.order);
    RayJob job;
    job.theta = theta;
    job.r0 = matching_radius(c);
    job.r1 = R_;
    job.u = f.u;
    job.w0 = f.scaled(job.r0, theta);
    const RayResult res = integrate_ray(q_.U, q_.mu, job, cfg_);
    const CVec y = std::exp(-f.u / std::polar(R_, theta)) * res.w1;
    it = cache_.emplace(k, y).first;
  }
  return class_of(it->second, theta);
}

CMat AsymptoticSolver::flag(int c, double theta) {
  const int n = q_.dim();
  const Route rt = route(c, theta);
  if (rt.whole) return CMat::Identity(n, n);
  CMat B(n, rt.seeds.size());
  for (size_t j = 0; j < rt.seeds.size(); ++j) B.col(j) = ray_class(rt.seeds[j], rt.ray);
  int expect = 0;
  for (int s : rt.seeds) expect += q_.multiplicity[s];
  Eigen::JacobiSVD<CMat> svd(B);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < sv(0) / cfg_.cond_limit)
    fail(ErrorKind::numerical,
         fmt::format("ill-conditioned frame at R (cond {:.3e}); try a larger --order or outer radius",
                     sv(0) / sv(sv.size() - 1)));
  CMat basis = orth(B, 0.0);
  if (basis.cols() != expect) fail(ErrorKind::numerical, "flag dimension mismatch");
  if (!rt.dual) return basis;
  const CMat rows = basis.transpose() * dual_pairing_;
  Eigen::JacobiSVD<CMat> ns(rows, Eigen::ComputeFullV);
  return ns.matrixV().rightCols(n - expect);
}

CMat AsymptoticSolver::image(int c, double theta0) {
  const int k = q_.multiplicity[c];
  const CMat A = flag(c, theta0 + kPi / 2), B = flag(c, theta0 - kPi / 2);
  CMat stacked(A.rows(), A.cols() + B.cols());
  stacked << A, -B;
  Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeFullV);
  const CMat ker = svd.matrixV().rightCols(k);
  return orth(A * ker.topRows(A.cols()), 0.0);
}

void AsymptoticSolver::prefetch(const std::vector<std::pair<int, double>>& images) {
  std::vector<std::pair<int, double>> want;
  std::vector<std::pair<int, long long>> keys;
  for (auto [c, th] : images)
    for (double side : {kPi / 2, -kPi / 2}) {
      const Route rt = route(c, th + side);
      if (rt.whole) continue;
      for (int s : rt.seeds) {
        auto k = key(s, rt.ray);
        if (cache_.count(k) || std::find(keys.begin(), keys.end(), k) != keys.end()) continue;
        keys.push_back(k);
        want.push_back({s, rt.ray});
      }
    }
  if (want.empty()) return;
  std::vector<RayJob> jobs;
  for (auto [s, ray] : want) {
    const FormalSolution f = formal_solution(q_.U, q_.mu, q_.exponents.value(s), cfg_.order);
    RayJob job;
    job.theta = ray;
    job.r0 = matching_radius(s);
    job.r1 = R_;
    job.u = f.u;
    job.w0 = f.scaled(job.r0, ray);
    jobs.push_back(job);
  }
  const auto res = integrate_rays(q_.U, q_.mu, jobs, cfg_, exec_);
  for (size_t j = 0; j < jobs.size(); ++j)
    cache_.emplace(keys[j], std::exp(-jobs[j].u / std::polar(R_, jobs[j].theta)) * res[j].w1);
}

MutationSystem AsymptoticFrame::system() const {
  MutationSystem ms;
  ms.P = P;
  ms.C = C;
  ms.tau = tau;
  ms.f = blocks;
  ms.grading = grading;
  ms.side = "A";
  for (const auto& b : blocks) {
    std::vector<int> g;
    for (int j = 0; j < b.cols(); ++j) {
      double odd = 0, all = b.col(j).norm();
      for (int i = 0; i < b.rows(); ++i)
        if (grading[i]) odd += std::norm(b(i, j));
      g.push_back(std::sqrt(odd) > 0.5 * all ? 1 : 0);
    }
    ms.block_grading.push_back(g);
  }
  return ms;
}

CVec normalize_line(const CVec& a, const CMat& P, const CVec* target) {
  const cplx s = (a.transpose() * P * a)(0);
  if (std::abs(s) < 1e-14 * a.squaredNorm() * std::max(1.0, P.norm()))
    fail(ErrorKind::numerical, "line is isotropic for the pairing");
  CVec v = a / std::sqrt(s);
  if (target) {
    if ((v.transpose() * P * *target)(0).real() < 0) v = -v;
  } else {
    int i = 0;
    while (i < v.size() - 1 && std::abs(v(i)) < 1e-12 * v.norm()) ++i;
    if (v(i).real() < 0) v = -v;
  }
  return v;
}

CMat extract_zero_block(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau,
                        int zero, const std::vector<int>& parity, int expected_dim) {
  const int n = static_cast<int>(P.rows());
  if (zero < 0) return CMat(n, 0);
  const auto pos = tau.positions();
  std::vector<CVec> rows;
  for (int c = 0; c < static_cast<int>(blocks.size()); ++c) {
    if (c == zero) continue;
    for (int j = 0; j < blocks[c].cols(); ++j) {
      const CVec b = blocks[c].col(j);
      // earlier blocks: [z, e) = 0; later blocks: [l, z) = 0
      rows.push_back(pos[c] < pos[zero] ? CVec(P * b) : CVec(P.transpose() * b));
    }
  }
  CMat M(rows.size(), n);
  for (size_t i = 0; i < rows.size(); ++i) M.row(i) = rows[i].transpose();
  const CMat Z = graded_null_space(M, parity);
  if (Z.cols() != expected_dim)
    fail(ErrorKind::validation, fmt::format("zero block has dimension {}, expected {}", Z.cols(),
                                            expected_dim));
  return Z;
}

AsymptoticFrame asymptotic_classes(AsymptoticSolver& s, const DirectionTuple& t) {
  const QuantumData& q = s.data();
  AsymptoticFrame fr;
  fr.C = q.exponents;
  fr.tuple = t;
  fr.single = std::all_of(t.per_exponent.begin(), t.per_exponent.end(),
                          [&](double a) { return a == t.per_exponent.front(); });
  fr.tau = fr.single ? tau_theta(fr.C, t.per_exponent.front()) : tau_theta_bullet(t, fr.C);
  fr.P = q.X.pairing_A();
  fr.grading = q.X.parity;
  fr.cfg = s.config();
  fr.R = s.outer_radius();
  const int m = fr.C.size(), z = q.zero_index();
  std::vector<std::pair<int, double>> req;
  for (int c = 0; c < m; ++c)
    if (c != z) req.push_back({c, t.per_exponent[c]});
  s.prefetch(req);
  fr.blocks.resize(m);
  fr.matching.assign(m, 0.0);
  for (auto [c, th] : req) {
    CMat im = s.image(c, th);
    for (int j = 0; j < im.cols(); ++j) im.col(j) = normalize_line(im.col(j), fr.P);
    fr.blocks[c] = im;
    fr.matching[c] = s.matching_radius(c);
  }
  if (z >= 0) fr.blocks[z] = extract_zero_block(fr.P, fr.blocks, fr.tau, z, fr.grading, q.multiplicity[z]);
  return fr;
}

AsymptoticFrame asymptotic_classes(AsymptoticSolver& s, double theta0) {
  if (!is_generic(theta0, s.data().exponents))
    fail(ErrorKind::precondition, "theta0 is not generic for -C_X");
  return asymptotic_classes(s, DirectionTuple::constant(theta0, s.data().exponents.size()));
}

double gamma_conjecture_angle(AsymptoticSolver& s) {
  const QuantumData& q = s.data();
  const int c = q.exponents.index_of("k0");
  const CVec a = s.ray_class(c, 0.0);
  const CVec g = gamma_ch(q.X, 0);
  return principal_angle(a, g);
}

}  // namespace sm
