#include "stokes_mutant/cohomology.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/zeta.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

namespace sm {

using boost::multiprecision::cpp_rational;

// ------------------------------------------------------------ the variety

int CompleteIntersection::index() const {
  return N + 1 - std::accumulate(degrees.begin(), degrees.end(), 0);
}

std::int64_t CompleteIntersection::degree() const {
  std::int64_t d = 1;
  for (int x : degrees) d *= x;
  return d;
}

double CompleteIntersection::D() const {
  double d = 1;
  for (int x : degrees) d *= std::pow(double(x), x);
  return d;
}

double CompleteIntersection::Dprime() const {
  double d = 1;
  for (int x : degrees) d *= std::tgamma(x + 1.0);
  return d;
}

std::string CompleteIntersection::name() const {
  if (degrees.empty()) return fmt::format("P{}", N);
  return fmt::format("X({})⊂P{}", fmt::join(degrees, ","), N);
}

void CompleteIntersection::validate() const {
  if (N < 1) fail(ErrorKind::precondition, "ambient dimension must be at least 1");
  if (degrees.empty()) return;
  for (int x : degrees)
    if (x < 2) fail(ErrorKind::precondition, "complete intersection degrees must be >= 2");
  if (dim() < 3) fail(ErrorKind::precondition, "complete intersection must have dimension >= 3");
  if (index() < 1) fail(ErrorKind::precondition, "not Fano: index r_X < 1");
}

// ------------------------------------------------------------ series

HPoly::HPoly(int d, std::vector<cplx> coeffs) : c_(std::move(coeffs)) { c_.resize(d + 1, 0.0); }

HPoly HPoly::one(int d) { return monomial(d, 0); }

HPoly HPoly::monomial(int d, int j, cplx a) {
  HPoly p(d);
  if (j <= d) p.c_[j] = a;
  return p;
}

HPoly HPoly::operator+(const HPoly& o) const {
  HPoly r = *this;
  for (int j = 0; j <= degree(); ++j) r.c_[j] += o.c_[j];
  return r;
}

HPoly HPoly::operator-(const HPoly& o) const { return *this + o * cplx(-1.0); }

HPoly HPoly::operator*(const HPoly& o) const {
  HPoly r(degree());
  for (int i = 0; i <= degree(); ++i)
    for (int j = 0; i + j <= degree(); ++j) r.c_[i + j] += c_[i] * o.c_[j];
  return r;
}

HPoly HPoly::operator*(cplx s) const {
  HPoly r = *this;
  for (auto& x : r.c_) x *= s;
  return r;
}

HPoly HPoly::exp() const {
  HPoly e(degree());
  e.c_[0] = 1.0;
  for (int k = 1; k <= degree(); ++k) {
    cplx s = 0;
    for (int j = 1; j <= k; ++j) s += double(j) * c_[j] * e.c_[k - j];
    e.c_[k] = s / double(k);
  }
  return e;
}

HPoly HPoly::log() const {
  HPoly l(degree());
  for (int k = 1; k <= degree(); ++k) {
    cplx s = double(k) * c_[k];
    for (int j = 1; j < k; ++j) s -= double(j) * l.c_[j] * c_[k - j];
    l.c_[k] = s / double(k);
  }
  return l;
}

HPoly HPoly::inverse() const {
  HPoly b(degree());
  b.c_[0] = 1.0 / c_[0];
  for (int k = 1; k <= degree(); ++k) {
    cplx s = 0;
    for (int j = 1; j <= k; ++j) s += c_[j] * b.c_[k - j];
    b.c_[k] = -s * b.c_[0];
  }
  return b;
}

HPoly HPoly::sqrt() const { return (log() * cplx(0.5)).exp(); }

HPoly HPoly::twisted() const {
  HPoly r = *this;
  cplx s = 1.0;
  for (auto& x : r.c_) {
    x *= s;
    s *= 2 * kPi * kI;
  }
  return r;
}

HPoly HPoly::reflected() const {
  HPoly r = *this;
  for (int j = 1; j <= degree(); j += 2) r.c_[j] = -r.c_[j];
  return r;
}

double HPoly::max_abs_diff(const HPoly& o) const {
  double m = 0;
  for (int j = 0; j <= degree(); ++j) m = std::max(m, std::abs(c_[j] - o.c_[j]));
  return m;
}

// ------------------------------------------------------------ characteristic classes

std::vector<std::int64_t> chern_integers(const CompleteIntersection& ci) {
  const int d = ci.dim();
  std::vector<std::int64_t> c(d + 1, 0);
  // (1+H)^{N+1}
  for (int j = 0; j <= d; ++j) {
    std::int64_t b = 1;
    for (int i = 0; i < j; ++i) b = b * (ci.N + 1 - i) / (i + 1);
    c[j] = b;
  }
  for (int di : ci.degrees) {  // divide by (1 + d_i H)
    for (int j = 1; j <= d; ++j) c[j] -= di * c[j - 1];
  }
  return c;
}

ChernData chern_data(const CompleteIntersection& ci) {
  const int d = ci.dim();
  const auto e = chern_integers(ci);
  ChernData out;
  out.total = HPoly(d);
  for (int j = 0; j <= d; ++j) out.total[j] = double(e[j]);
  // Newton: p_j = sum_{i<j} (-1)^{i-1} e_i p_{j-i} + (-1)^{j-1} j e_j
  std::vector<double> p(d + 1, 0.0);
  p[0] = d;
  for (int j = 1; j <= d; ++j) {
    double s = ((j - 1) % 2 ? -1.0 : 1.0) * j * double(e[j]);
    for (int i = 1; i < j; ++i) s += ((i - 1) % 2 ? -1.0 : 1.0) * double(e[i]) * p[j - i];
    p[j] = s;
  }
  out.power_sums = p;
  return out;
}

HPoly gamma_class(const CompleteIntersection& ci) {
  const int d = ci.dim();
  const auto p = chern_data(ci).power_sums;
  HPoly l(d);
  if (d >= 1) l[1] = -boost::math::constants::euler<double>() * p[1];
  for (int j = 2; j <= d; ++j) l[j] = (j % 2 ? -1.0 : 1.0) * boost::math::zeta(double(j)) * p[j] / j;
  return l.exp();
}

// log(x/(1-e^{-x})) = x/2 - sum_k B_{2k} x^{2k} / (2k (2k)!)
HPoly todd_class(const CompleteIntersection& ci, bool twist) {
  const int d = ci.dim();
  const auto p = chern_data(ci).power_sums;
  HPoly l(d);
  if (d >= 1) l[1] = 0.5 * p[1];
  for (int k = 1; 2 * k <= d; ++k)
    l[2 * k] = -boost::math::bernoulli_b2n<double>(k) * p[2 * k] / (2.0 * k * std::tgamma(2.0 * k + 1));
  HPoly t = l.exp();
  return twist ? t.twisted() : t;
}

HPoly sqrt_todd(const CompleteIntersection& ci, bool twist) { return todd_class(ci, twist).sqrt(); }

HPoly chern_character(const CompleteIntersection& ci, int k, bool twist) {
  const HPoly x = HPoly::monomial(ci.dim(), 1, double(k));
  const HPoly e = x.exp();
  return twist ? e.twisted() : e;
}

// ------------------------------------------------------------ the model

std::int64_t topological_euler(const CompleteIntersection& ci) {
  return chern_integers(ci)[ci.dim()] * ci.degree();
}

int primitive_dim(const CompleteIntersection& ci) {
  const int d = ci.dim();
  const std::int64_t b = (d % 2 ? -1 : 1) * (topological_euler(ci) - (d + 1));
  if (b < 0) fail(ErrorKind::numerical, "negative primitive rank");
  return static_cast<int>(b);
}

std::vector<CompleteIntersection> fano_complete_intersections(int max_n) {
  std::vector<CompleteIntersection> out;
  std::function<void(int, std::vector<int>&, int)> rec = [&](int N, std::vector<int>& deg, int lo) {
    if (!deg.empty()) {
      CompleteIntersection ci{N, deg};
      if (ci.dim() >= 3 && ci.index() >= 1) out.push_back(ci);
    }
    for (int x = lo; x <= N; ++x) {
      deg.push_back(x);
      const CompleteIntersection t{N, deg};
      if (t.dim() >= 3 && t.index() >= 1) rec(N, deg, x);
      deg.pop_back();
    }
  };
  for (int N = 4; N <= max_n; ++N) {
    std::vector<int> deg;
    rec(N, deg, 2);
  }
  return out;
}

CohomologyModel::CohomologyModel(const CompleteIntersection& x, bool with_primitive) : ci(x) {
  d = ci.dim();
  b = with_primitive ? primitive_dim(ci) : 0;
  n = d + 1 + b;
  prim_parity = d % 2;
  if (prim_parity && b % 2) fail(ErrorKind::numerical, "odd primitive rank in odd dimension");
  gram = CMat::Zero(n, n);
  for (int i = 0; i <= d; ++i) gram(i, d - i) = double(ci.degree());
  const int o = d + 1;
  if (prim_parity == 0) {
    for (int i = 0; i < b; ++i) gram(o + i, o + i) = 1.0;
  } else {
    const int h = b / 2;
    for (int i = 0; i < h; ++i) {
      gram(o + i, o + h + i) = 1.0;
      gram(o + h + i, o + i) = -1.0;
    }
  }
  parity.assign(n, 0);
  for (int i = 0; i < b; ++i) parity[o + i] = prim_parity;
}

CVec CohomologyModel::ambient(const HPoly& p) const {
  CVec v = CVec::Zero(n);
  for (int j = 0; j <= d; ++j) v(j) = p[j];
  return v;
}

HPoly CohomologyModel::ambient_part(const CVec& v) const {
  HPoly p(d);
  for (int j = 0; j <= d; ++j) p[j] = v(j);
  return p;
}

cplx CohomologyModel::integrate_top(const CVec& v) const { return v(d) * double(ci.degree()); }

CMat CohomologyModel::mu() const {
  CMat m = CMat::Zero(n, n);
  for (int j = 0; j <= d; ++j) m(j, j) = j - d / 2.0;
  return m;
}

CMat CohomologyModel::rho() const {
  CMat r = CMat::Zero(n, n);
  for (int j = 0; j < d; ++j) r(j + 1, j) = double(ci.index());
  return r;
}

CMat CohomologyModel::mult(const HPoly& p) const {
  CMat m = CMat::Zero(n, n);
  for (int j = 0; j <= d; ++j)
    for (int i = j; i <= d; ++i) m(i, j) = p[i - j];
  for (int k = d + 1; k < n; ++k) m(k, k) = p[0];
  return m;
}

CMat CohomologyModel::W() const {
  CMat w = CMat::Zero(n, n);
  for (int j = 0; j <= d; ++j) w(j, j) = (j % 2) ? -1.0 : 1.0;
  const cplx id = std::pow(kI, d);
  for (int k = d + 1; k < n; ++k) w(k, k) = id;
  return w;
}

CMat CohomologyModel::exp_rho(cplx t) const {
  const CMat r = rho() * t;
  CMat e = CMat::Identity(n, n), term = CMat::Identity(n, n);
  for (int k = 1; k <= d; ++k) {
    term = term * r / double(k);
    e += term;
  }
  return e;
}

static CMat exp_diag_mu(const CohomologyModel& X, cplx t) {
  CMat e = CMat::Identity(X.n, X.n);
  for (int j = 0; j <= X.d; ++j) e(j, j) = std::exp(t * (j - X.d / 2.0));
  return e;
}

CMat CohomologyModel::pairing_A() const {
  const CMat E = exp_diag_mu(*this, kPi * kI) * exp_rho(-kPi * kI);
  return E.transpose() * gram / std::pow(2 * kPi, d);
}

CMat CohomologyModel::pairing_B() const {
  const CMat E = exp_rho(kPi * kI) * W();
  return E.transpose() * gram / std::pow(2 * kPi * kI, d);
}

CMat CohomologyModel::serre_monodromy() const {
  CMat s = CMat::Identity(n, n) * ((d % 2) ? -1.0 : 1.0);
  if (d % 2)
    for (int k = d + 1; k < n; ++k) s(k, k) = 1.0;  // (-1)^d (-1)^d on primitive
  return s * exp_rho(2 * kPi * kI);
}

cplx integrate(const CohomologyModel& X, const CVec& a) { return X.integrate_top(a); }

cplx pairing_A(const CohomologyModel& X, const CVec& a, const CVec& b) {
  return (a.transpose() * X.pairing_A() * b)(0, 0);
}

cplx pairing_B(const CohomologyModel& X, const CVec& a, const CVec& b) {
  return (a.transpose() * X.pairing_B() * b)(0, 0);
}

// ------------------------------------------------------------ Gamma map

std::string GammaChoice::str() const {
  return fmt::format("{}{}", convention == GammaConvention::todd ? "Gamma/Td" : "Gamma/sqrt(Td)",
                     twist ? " (twisted Td)" : " (untwisted Td)");
}

CMat gamma_matrix(const CohomologyModel& X, GammaChoice g) {
  const HPoly div = g.convention == GammaConvention::todd ? todd_class(X.ci, g.twist)
                                                          : sqrt_todd(X.ci, g.twist);
  return X.mult(gamma_class(X.ci) * div.inverse());
}

CVec gamma_map(const CohomologyModel& X, const CVec& a, GammaChoice g) {
  return gamma_matrix(X, g) * a;
}

CVec gamma_ch(const CohomologyModel& X, int k) {
  return X.ambient(gamma_class(X.ci) * chern_character(X.ci, k, true));
}

CVec mukai_vector(const CohomologyModel& X, int k) {
  return X.ambient(chern_character(X.ci, k, true) * sqrt_todd(X.ci, true));
}

cplx euler_chi_pairing(const CohomologyModel& X, int k1, int k2) {
  return pairing_A(X, gamma_ch(X, k1), gamma_ch(X, k2));
}

// Exact integral of ch(O(k)) td over X in Q[H]/H^{d+1}.
std::int64_t euler_chi_hrr(const CompleteIntersection& ci, int k1, int k2) {
  const int d = ci.dim();
  using Q = cpp_rational;
  using S = std::vector<Q>;
  auto mul = [d](const S& a, const S& b) {
    S r(d + 1, Q(0));
    for (int i = 0; i <= d; ++i)
      for (int j = 0; i + j <= d; ++j) r[i + j] += a[i] * b[j];
    return r;
  };
  auto inv = [d](const S& a) {
    S r(d + 1, Q(0));
    r[0] = Q(1) / a[0];
    for (int k = 1; k <= d; ++k) {
      Q s = 0;
      for (int j = 1; j <= k; ++j) s += a[j] * r[k - j];
      r[k] = -s * r[0];
    }
    return r;
  };
  // (1 - e^{-aH}) / (aH) = sum_j (-a)^j H^j / (j+1)!
  auto shifted = [d](int a) {
    S r(d + 1);
    Q fact = 1, pw = 1;
    for (int j = 0; j <= d; ++j) {
      fact *= (j + 1);
      r[j] = pw / fact;
      pw *= -a;
    }
    return r;
  };
  S td(d + 1, Q(0));
  td[0] = 1;
  const S hp = inv(shifted(1));
  for (int i = 0; i <= ci.N; ++i) td = mul(td, hp);
  for (int a : ci.degrees) td = mul(td, shifted(a));
  S ch(d + 1);
  Q fact = 1, pw = 1;
  for (int j = 0; j <= d; ++j) {
    if (j) fact *= j;
    ch[j] = pw / fact;
    pw *= (k2 - k1);
  }
  const Q chi = mul(ch, td)[d] * Q(ci.degree());
  if (denominator(chi) != 1) fail(ErrorKind::numerical, "Riemann-Roch gave a non-integer");
  return static_cast<std::int64_t>(numerator(chi));
}

cplx euler_chi(const CohomologyModel& X, int k1, int k2, double tol) {
  const cplx p = euler_chi_pairing(X, k1, k2);
  const auto h = euler_chi_hrr(X.ci, k1, k2);
  if (std::abs(p - double(h)) > tol * std::max(1.0, std::abs(double(h))))
    fail(ErrorKind::numerical,
         fmt::format("convention inconsistency: pairing chi = {}+{}i, Riemann-Roch chi = {}", p.real(),
                     p.imag(), h));
  return p;
}

// ------------------------------------------------------------ convention resolution

double pairing_compat_residual(const CohomologyModel& X, GammaChoice g, const CVec& a, const CVec& b) {
  const CMat G = gamma_matrix(X, g);
  const CMat PA = X.pairing_A(), PB = X.pairing_B();
  const cplx lhs = ((G * a).transpose() * PA * (G * b))(0, 0);
  const cplx rhs = (a.transpose() * PB * b)(0, 0);
  const double scale = a.norm() * b.norm() * std::max(PA.norm(), PB.norm());
  return std::abs(lhs - rhs) / scale;
}

std::string ConventionResolution::text() const {
  std::string s;
  for (const auto& t : trials)
    s += fmt::format("{:<32} worst residual {:.3e}  {}\n", t.choice.str(), t.worst_residual,
                     t.pass ? "pass" : "fail");
  s += unique ? fmt::format("selected: {}\n", selected.str()) : std::string("no unique passing convention\n");
  return s;
}

ConventionResolution resolve_gamma_convention(const std::vector<CompleteIntersection>& samples,
                                              int pairs, std::uint64_t seed, double tol) {
  ConventionResolution res;
  for (auto conv : {GammaConvention::todd, GammaConvention::sqrt_todd})
    for (bool tw : {true, false}) res.trials.push_back({{conv, tw}, 0.0, false});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  for (const auto& ci : samples) {
    if (ci.dim() < 2) continue;  // P^1 cannot separate the conventions
    const CohomologyModel X(ci);
    for (int k = 0; k < pairs; ++k) {
      CVec a(X.n), b(X.n);
      for (int i = 0; i < X.n; ++i) {
        a(i) = cplx(u(rng), u(rng));
        b(i) = cplx(u(rng), u(rng));
      }
      for (auto& t : res.trials) t.worst_residual = std::max(t.worst_residual, pairing_compat_residual(X, t.choice, a, b));
    }
  }
  int passing = 0;
  for (auto& t : res.trials) {
    t.pass = t.worst_residual <= tol;
    if (t.pass && passing++ == 0) res.selected = t.choice;
  }
  res.unique = passing == 1;
  return res;
}

}  // namespace sm
