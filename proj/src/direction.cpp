#include "stokes_mutant/direction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sm {

ExponentSet::ExponentSet(std::vector<Exponent> entries) : e_(std::move(entries)) {
  std::set<std::string> ids;
  for (size_t i = 0; i < e_.size(); ++i) {
    if (!ids.insert(e_[i].id).second) fail(ErrorKind::structural, "duplicate exponent id " + e_[i].id);
    for (size_t j = 0; j < i; ++j)
      if (e_[i].value == e_[j].value)
        fail(ErrorKind::structural, "exponents " + e_[j].id + " and " + e_[i].id + " coincide");
  }
}

int ExponentSet::index_of(const std::string& id) const {
  for (int i = 0; i < size(); ++i)
    if (e_[i].id == id) return i;
  fail(ErrorKind::structural, "unknown exponent id " + id);
}

std::vector<int> Ordering::positions() const {
  std::vector<int> p(seq.size());
  for (int k = 0; k < size(); ++k) p[seq[k]] = k;
  return p;
}

DirectionTuple::DirectionTuple(double ref, std::vector<double> angles)
    : theta_ref(ref), per_exponent(std::move(angles)) {}

DirectionTuple DirectionTuple::from_map(double ref, const std::map<std::string, double>& by_id,
                                        const ExponentSet& C) {
  std::vector<double> a(C.size());
  for (int i = 0; i < C.size(); ++i) {
    auto it = by_id.find(C[i].id);
    if (it == by_id.end()) fail(ErrorKind::structural, "no angle for exponent " + C[i].id);
    a[i] = it->second;
  }
  return DirectionTuple(ref, std::move(a));
}

double dist_mod(double x, double a, double period) {
  return std::abs(std::remainder(x - a, period));
}

static double proj(cplx c, double theta) { return std::real(std::polar(1.0, -theta) * c); }

bool lt_theta(cplx c, cplx c2, double theta) { return proj(c, theta) < proj(c2, theta); }

bool leq_theta(cplx c, cplx c2, double theta) { return c == c2 || lt_theta(c, c2, theta); }

std::array<double, 2> stokes_directions(cplx c, cplx c2) {
  if (c == c2) fail(ErrorKind::precondition, "no Stokes direction for equal exponents");
  const double a = std::arg(c - c2);
  auto red = [](double x) {
    double y = std::fmod(x, 2 * kPi);
    return y < 0 ? y + 2 * kPi : y;
  };
  std::array<double, 2> s{red(a + kPi / 2), red(a - kPi / 2)};
  if (s[0] > s[1]) std::swap(s[0], s[1]);
  return s;
}

// theta + pi/2 hits a Stokes direction of (c,c') iff theta = arg(c-c') mod pi.
bool is_generic(double theta, const ExponentSet& C, double tol) {
  for (int i = 0; i < C.size(); ++i)
    for (int j = i + 1; j < C.size(); ++j)
      if (dist_mod(theta, std::arg(C.value(i) - C.value(j)), kPi) <= tol) return false;
  return true;
}

Ordering tau_theta(const ExponentSet& C, double theta, double tol) {
  if (!is_generic(theta, C, tol)) fail(ErrorKind::precondition, "direction is not C-generic");
  Ordering o;
  o.seq.resize(C.size());
  for (int i = 0; i < C.size(); ++i) o.seq[i] = i;
  std::sort(o.seq.begin(), o.seq.end(),
            [&](int a, int b) { return lt_theta(C.value(a), C.value(b), theta + kPi / 2); });
  return o;
}

static double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Closed half-lines p + r u and q + s v, r,s >= 0.
static bool rays_meet(cplx p, cplx u, cplx q, cplx v) {
  const cplx w = q - p;
  const double scale = std::max(1.0, std::abs(w));
  const double den = cross(u, v);
  if (std::abs(den) > 1e-14) {
    const double r = cross(w, v) / den;
    const double s = -cross(u, w) / den;
    return r >= -1e-14 * scale && s >= -1e-14 * scale;
  }
  if (std::abs(cross(u, w)) > 1e-12 * scale) return false;  // parallel, distinct lines
  if (std::real(std::conj(u) * v) > 0) return true;           // same direction, same line
  return std::real(std::conj(u) * w) >= 0;                   // opposite: q ahead of p
}

bool lt_theta_bullet(int c, int c2, const DirectionTuple& t, const ExponentSet& C, double tol) {
  if (c == c2) return false;
  const double a = t.per_exponent[c], b = t.per_exponent[c2];
  if (std::abs(a - b) <= tol) return lt_theta(C.value(c), C.value(c2), a + kPi / 2);
  if (a < b) return false;
  return !rays_meet(C.value(c), -std::polar(1.0, a), C.value(c2), -std::polar(1.0, b));
}

bool lt_theta_bullet_cases(int c, int c2, const DirectionTuple& t, const ExponentSet& C,
                           double tol) {
  if (c == c2) return false;
  const double a = t.per_exponent[c], b = t.per_exponent[c2];
  const cplx x = C.value(c), y = C.value(c2);
  if (std::abs(a - b) <= tol) return lt_theta(x, y, a + kPi / 2);
  if (a < b) return false;
  if (b > a - kPi) return lt_theta(x, y, a + kPi / 2) || lt_theta(x, y, b + kPi / 2);
  return lt_theta(y, x, a + kPi / 2) || lt_theta(y, x, b + kPi / 2);
}

bool in_range(const DirectionTuple& t, double tol) {
  for (double a : t.per_exponent)
    if (!(a <= t.theta_ref + tol && a > t.theta_ref - 2 * kPi + tol)) return false;
  return true;
}

bool is_ordered(const DirectionTuple& t, const ExponentSet& C, double tol) {
  const int m = C.size();
  if (static_cast<int>(t.per_exponent.size()) != m || !in_range(t, tol)) return false;
  for (double a : t.per_exponent)
    if (!is_generic(a, C, tol)) return false;
  std::vector<std::vector<char>> lt(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) lt[i][j] = lt_theta_bullet(i, j, t, C, tol);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (lt[i][j] == lt[j][i]) return false;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        if (lt[i][j] && lt[j][k] && !lt[i][k]) return false;
  return true;
}

Ordering tau_theta_bullet(const DirectionTuple& t, const ExponentSet& C, double tol) {
  if (!is_ordered(t, C, tol)) fail(ErrorKind::precondition, "direction tuple is not ordered");
  const int m = C.size();
  Ordering o;
  o.seq.assign(m, -1);
  for (int i = 0; i < m; ++i) {
    int below = 0;
    for (int j = 0; j < m; ++j) below += lt_theta_bullet(j, i, t, C, tol);
    o.seq[below] = i;
  }
  return o;
}

std::vector<std::pair<int, int>> r_theta(const ExponentSet& C, double theta, double tol) {
  std::vector<std::pair<int, int>> out;
  const cplx rot = std::polar(1.0, -theta);
  for (int i = 0; i < C.size(); ++i)
    for (int j = 0; j < C.size(); ++j) {
      if (i == j) continue;
      const cplx d = rot * (C.value(i) - C.value(j));
      if (std::abs(d.imag()) <= tol * std::abs(d) && d.real() > 0) out.emplace_back(i, j);
    }
  return out;
}

std::vector<double> crossing_angles(const ExponentSet& C, double theta0, double tol) {
  if (!is_generic(theta0, C, tol)) fail(ErrorKind::precondition, "direction is not C-generic");
  std::vector<double> out;
  for (int i = 0; i < C.size(); ++i)
    for (int j = i + 1; j < C.size(); ++j) {
      // representative of arg(c_i - c_j) mod pi inside (theta0 - pi, theta0)
      const double a = std::arg(C.value(i) - C.value(j));
      double t = theta0 - kPi + std::fmod(a - (theta0 - kPi), kPi);
      if (t <= theta0 - kPi) t += kPi;
      if (t >= theta0) t -= kPi;
      bool dup = false;
      for (double s : out) dup = dup || std::abs(s - t) <= tol;
      if (!dup) out.push_back(t);
    }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace sm
