#include "stokes_mutant/mutation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace sm {

// ---------------------------------------------------------------- reports

bool Report::ok() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.ok; });
}

double Report::worst() const {
  double w = 0;
  for (const auto& c : clauses) w = std::max(w, c.residual);
  return w;
}

void Report::add(std::string name, double residual, double tol) {
  clauses.push_back({std::move(name), residual, std::isfinite(residual) && residual <= tol});
}

std::string Report::text() const {
  std::string s;
  for (const auto& c : clauses)
    s += fmt::format("{} {:<40} residual {:.3e}\n", c.ok ? "ok  " : "FAIL", c.name, c.residual);
  return s;
}

double rel_diff(const CMat& a, const CMat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  if (a.size() == 0) return 0.0;
  return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm()));
}

// ------------------------------------------------------------ accessors

std::vector<int> StokesData::block_dims_in_order() const {
  std::vector<int> d;
  for (int c : tau.seq) d.push_back(block_dim(c));
  return d;
}

CMat StokesData::f_matrix() const {
  CMat F(dim(), dim());
  int col = 0;
  for (int c : tau.seq) {
    F.middleCols(col, f[c].cols()) = f[c];
    col += f[c].cols();
  }
  return F;
}

CMat StokesData::fstar_matrix() const {
  CMat F(dim(), dim());
  int row = 0;
  for (int c : tau.seq) {
    F.middleRows(row, fstar[c].rows()) = fstar[c];
    row += fstar[c].rows();
  }
  return F;
}

CMat StokesData::Tc_sum() const {
  CMat S = CMat::Zero(dim(), dim());
  int k = 0;
  for (int c : tau.seq) {
    S.block(k, k, Tc[c].rows(), Tc[c].cols()) = Tc[c];
    k += Tc[c].rows();
  }
  return S;
}

CMat StokesData::fshriek(int c) const {
  return Tc[c].partialPivLu().solve(fstar[c] * T);
}

CMat MutationSystem::f_matrix() const {
  CMat F(dim(), dim());
  int col = 0;
  for (int c : tau.seq) {
    F.middleCols(col, f[c].cols()) = f[c];
    col += f[c].cols();
  }
  return F;
}

double stokes_diff(const StokesData& a, const StokesData& b) {
  if (!(a.tau == b.tau)) return INFINITY;
  double r = 0;
  for (int c = 0; c < a.m(); ++c) {
    r = std::max(r, rel_diff(a.f[c], b.f[c]));
    r = std::max(r, rel_diff(a.fstar[c], b.fstar[c]));
  }
  return r;
}

// ------------------------------------------------------------ permutations

Permutation Permutation::identity(int m) {
  Permutation p;
  p.img.resize(m);
  for (int k = 0; k < m; ++k) p.img[k] = k;
  return p;
}

Permutation Permutation::longest(int m) {
  Permutation p;
  p.img.resize(m);
  for (int k = 0; k < m; ++k) p.img[k] = m - 1 - k;
  return p;
}

Permutation Permutation::transposition(int m, int i) {
  Permutation p = identity(m);
  std::swap(p.img[i - 1], p.img[i]);
  return p;
}

Permutation Permutation::compose(const Permutation& right) const {
  Permutation p;
  p.img.resize(size());
  for (int k = 0; k < size(); ++k) p.img[k] = img[right.img[k]];
  return p;
}

Permutation Permutation::inverse() const {
  Permutation p;
  p.img.resize(size());
  for (int k = 0; k < size(); ++k) p.img[img[k]] = k;
  return p;
}

int Permutation::length() const {
  int l = 0;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j) l += img[i] > img[j];
  return l;
}

Ordering act(const Permutation& s, const Ordering& tau) {
  Ordering o;
  o.seq.resize(tau.seq.size());
  for (int k = 0; k < tau.size(); ++k) o.seq[s.img[k]] = tau.seq[k];
  return o;
}

Permutation relative(const Ordering& to, const Ordering& from) {
  const auto pt = to.positions();
  Permutation s;
  s.img.resize(from.seq.size());
  for (int k = 0; k < from.size(); ++k) s.img[k] = pt[from.seq[k]];
  return s;
}

Permutation underlying(const BraidWord& w) {
  Permutation s = Permutation::identity(w.m);
  for (const auto& l : w.letters) s = s.compose(Permutation::transposition(w.m, l.i));
  return s;
}

// ------------------------------------------------------------ braid words

BraidWord BraidWord::inverse() const {
  BraidWord r{m, {}};
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) r.letters.push_back({it->i, -it->sign});
  return r;
}

BraidWord BraidWord::then(const BraidWord& later) const {
  BraidWord r{m, later.letters};
  r.letters.insert(r.letters.end(), letters.begin(), letters.end());
  return r;
}

std::string BraidWord::str() const {
  std::string s;
  for (const auto& l : letters) {
    if (!s.empty()) s += ' ';
    s += fmt::format("s{}{}", l.i, l.sign < 0 ? "^-1" : "");
  }
  return s;
}

BraidWord BraidWord::parse(const std::string& text, int m) {
  BraidWord w{m, {}};
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    bool inv = false;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      inv = true;
      tok.resize(tok.size() - 3);
    }
    BraidWord piece{m, {}};
    if (tok == "delta") {
      piece = delta_word(m);
    } else if (tok.size() >= 2 && tok[0] == 's') {
      int i = 0;
      try {
        size_t used = 0;
        i = std::stoi(tok.substr(1), &used);
        if (used != tok.size() - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        fail(ErrorKind::malformed, "bad braid letter '" + tok + "'");
      }
      if (i < 1 || i >= m) fail(ErrorKind::malformed, fmt::format("generator s{} out of range for m={}", i, m));
      piece.letters.push_back({i, 1});
    } else {
      fail(ErrorKind::malformed, "bad braid letter '" + tok + "'");
    }
    if (inv) piece = piece.inverse();
    w.letters.insert(w.letters.end(), piece.letters.begin(), piece.letters.end());
  }
  return w;
}

// ------------------------------------------------------------ validation

void check_shapes(const StokesData& sd) {
  const int n = sd.dim(), m = sd.m();
  if (sd.T.cols() != n) fail(ErrorKind::structural, "T is not square");
  if (static_cast<int>(sd.f.size()) != m || static_cast<int>(sd.fstar.size()) != m ||
      static_cast<int>(sd.Tc.size()) != m || sd.tau.size() != m)
    fail(ErrorKind::structural, "block count does not match exponent count");
  std::vector<int> seen(m, 0);
  for (int c : sd.tau.seq) {
    if (c < 0 || c >= m || seen[c]++) fail(ErrorKind::structural, "ordering is not a bijection");
  }
  int total = 0;
  for (int c = 0; c < m; ++c) {
    const int d = static_cast<int>(sd.f[c].cols());
    if (sd.f[c].rows() != n || sd.fstar[c].rows() != d || sd.fstar[c].cols() != n ||
        sd.Tc[c].rows() != d || sd.Tc[c].cols() != d)
      fail(ErrorKind::structural, "shape mismatch in block " + sd.C[c].id);
    total += d;
  }
  if (total != n) fail(ErrorKind::structural, "block dimensions do not add up to dim V");
}

static double inv_cond(const CMat& A) {
  if (A.size() == 0) return 1.0;
  Eigen::JacobiSVD<CMat> svd(A);
  const auto& s = svd.singularValues();
  return s(0) > 0 ? s(s.size() - 1) / s(0) : 0.0;
}

Report validate_stokes_data(const StokesData& sd, double tol) {
  check_shapes(sd);
  Report r;
  const int m = sd.m();
  const auto pos = sd.tau.positions();
  r.add("T invertible (1/cond)", inv_cond(sd.T) > 1e-13 ? 0.0 : 1.0, 0.5);
  r.add("f invertible (1/cond)", inv_cond(sd.f_matrix()) > 1e-13 ? 0.0 : 1.0, 0.5);
  r.add("f* invertible (1/cond)", inv_cond(sd.fstar_matrix()) > 1e-13 ? 0.0 : 1.0, 0.5);
  double r1 = 0, r2 = 0;
  std::vector<CMat> fs(m);
  for (int c = 0; c < m; ++c) fs[c] = sd.fshriek(c);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (sd.f[a].cols() == 0 || sd.f[b].cols() == 0) continue;
      const double s1 = std::max(1.0, sd.fstar[b].norm() * sd.f[a].norm());
      const double s2 = std::max(1.0, fs[b].norm() * sd.f[a].norm());
      const CMat p1 = sd.fstar[b] * sd.f[a], p2 = fs[b] * sd.f[a];
      if (a == b) {
        r1 = std::max(r1, (p1 - CMat::Identity(p1.rows(), p1.cols())).norm() / s1);
        r2 = std::max(r2, (p2 - CMat::Identity(p2.rows(), p2.cols())).norm() / s2);
      } else {
        if (pos[b] < pos[a]) r1 = std::max(r1, p1.norm() / s1);
        if (pos[a] < pos[b]) r2 = std::max(r2, p2.norm() / s2);
      }
    }
  r.add("(1) f*_c' f_c = 0 (tau c' < tau c), f*_c f_c = id", r1, tol);
  r.add("(2) f!_c' f_c = 0 (tau c < tau c'), f!_c f_c = id", r2, tol);
  return r;
}

static CMat parity_matrix(const std::vector<int>& g, int n) {
  CMat G = CMat::Identity(n, n);
  for (int k = 0; k < static_cast<int>(g.size()); ++k)
    if (g[k] & 1) G(k, k) = -1.0;
  return G;
}

CMat derive_T(const MutationSystem& ms) {
  const int n = ms.dim();
  return ms.P.transpose().partialPivLu().solve(ms.P * parity_matrix(ms.grading, n));
}

CMat block_pairing(const MutationSystem& ms, int c) {
  return ms.f[c].transpose() * ms.P * ms.f[c];
}

StokesData derive_stokes(const MutationSystem& ms) {
  StokesData sd;
  sd.C = ms.C;
  sd.tau = ms.tau;
  sd.f = ms.f;
  sd.grading = ms.grading;
  sd.block_grading = ms.block_grading;
  sd.T = derive_T(ms);
  const int m = ms.m();
  sd.fstar.resize(m);
  sd.Tc.resize(m);
  for (int c = 0; c < m; ++c) {
    const int d = static_cast<int>(ms.f[c].cols());
    if (d == 0) {
      sd.fstar[c] = CMat(0, ms.dim());
      sd.Tc[c] = CMat(0, 0);
      continue;
    }
    const CMat Pc = block_pairing(ms, c);
    if (inv_cond(Pc) < 1e-12) fail(ErrorKind::validation, "block pairing singular at " + ms.C[c].id);
    auto lu = Pc.transpose().partialPivLu();
    sd.fstar[c] = lu.solve(ms.f[c].transpose() * ms.P.transpose());
    const std::vector<int> g =
        c < static_cast<int>(ms.block_grading.size()) ? ms.block_grading[c] : std::vector<int>{};
    sd.Tc[c] = lu.solve(Pc * parity_matrix(g, d));
  }
  return sd;
}

MutationSystem with_pairing(const StokesData& sd, const CMat& P, std::string side) {
  MutationSystem ms;
  ms.P = P;
  ms.C = sd.C;
  ms.tau = sd.tau;
  ms.f = sd.f;
  ms.grading = sd.grading;
  ms.block_grading = sd.block_grading;
  ms.side = std::move(side);
  return ms;
}

Report validate_mutation_system(const MutationSystem& ms, double tol) {
  Report r;
  const int n = ms.dim(), m = ms.m();
  if (ms.P.cols() != n || static_cast<int>(ms.f.size()) != m || ms.tau.size() != m)
    fail(ErrorKind::structural, "mutation system shape mismatch");
  int total = 0;
  for (int c = 0; c < m; ++c) {
    if (ms.f[c].rows() != n) fail(ErrorKind::structural, "block " + ms.C[c].id + " has wrong row count");
    total += ms.f[c].cols();
  }
  if (total != n) fail(ErrorKind::structural, "block dimensions do not add up to dim V");
  r.add("pairing non-degenerate (1/cond)", inv_cond(ms.P) > 1e-13 ? 0.0 : 1.0, 0.5);
  double bad = 0;
  for (int c = 0; c < m; ++c)
    if (ms.f[c].cols() > 0 && inv_cond(block_pairing(ms, c)) < 1e-12) bad = 1.0;
  r.add("block pairings non-degenerate", bad, 0.5);
  const auto pos = ms.tau.positions();
  double so = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (pos[a] > pos[b] && ms.f[a].cols() && ms.f[b].cols())
        so = std::max(so, (ms.f[a].transpose() * ms.P * ms.f[b]).norm() /
                              std::max(1.0, ms.f[a].norm() * ms.P.norm() * ms.f[b].norm()));
  r.add("semiorthogonality [f_c v, f_c' w> = 0 (tau c > tau c')", so, tol);
  if (!r.ok()) return r;
  const StokesData sd = derive_stokes(ms);
  const CMat G = parity_matrix(ms.grading, n);
  r.add("compatibility [Tv,w> = (-1)^deg v [w,v>",
        rel_diff(sd.T.transpose() * ms.P, G * ms.P.transpose()), tol);
  for (const auto& c : validate_stokes_data(sd, tol).clauses) r.clauses.push_back(c);
  return r;
}

// ------------------------------------------------------------ mutations

MutationEndos mutation_endos(const StokesData& sd, int i) {
  const int n = sd.dim();
  if (i < 1 || i > sd.m()) fail(ErrorKind::precondition, fmt::format("index {} out of range", i));
  const int c = sd.tau.at(i - 1);
  const CMat I = CMat::Identity(n, n);
  MutationEndos e;
  if (sd.f[c].cols() == 0) {
    e.R = e.Rstar = e.L = e.Lshriek = I;
    return e;
  }
  const CMat& fc = sd.f[c];
  const CMat fs = sd.fshriek(c);
  e.R = I - fc * sd.fstar[c];
  e.Rstar = I - sd.T * fc * sd.Tc[c].partialPivLu().solve(sd.fstar[c]);
  e.L = I - fc * fs;
  e.Lshriek = I - sd.T.partialPivLu().solve(fc * sd.Tc[c] * fs);
  return e;
}

StokesData mutate_right(const StokesData& sd, int i) {
  if (i < 2 || i > sd.m()) fail(ErrorKind::precondition, fmt::format("right mutation index {} out of range", i));
  StokesData out = sd;
  const int c = sd.tau.at(i - 2);
  if (sd.f[c].cols() > 0) {
    const MutationEndos e = mutation_endos(sd, i);
    out.f[c] = e.R * sd.f[c];
    out.fstar[c] = sd.fstar[c] * e.Rstar;
  }
  std::swap(out.tau.seq[i - 2], out.tau.seq[i - 1]);
  return out;
}

StokesData mutate_left(const StokesData& sd, int i) {
  if (i < 1 || i >= sd.m()) fail(ErrorKind::precondition, fmt::format("left mutation index {} out of range", i));
  StokesData out = sd;
  const int c = sd.tau.at(i);
  if (sd.f[c].cols() > 0) {
    const MutationEndos e = mutation_endos(sd, i);
    out.f[c] = e.L * sd.f[c];
    const CMat x = sd.fstar[c] * sd.T * e.Lshriek;
    out.fstar[c] = sd.T.transpose().partialPivLu().solve(x.transpose()).transpose();
  }
  std::swap(out.tau.seq[i - 1], out.tau.seq[i]);
  return out;
}

StokesData apply_braid(const StokesData& sd, const BraidWord& w) {
  if (w.m != sd.m()) fail(ErrorKind::precondition, "braid word strand count does not match");
  StokesData cur = sd;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    cur = it->sign > 0 ? mutate_right(cur, it->i + 1) : mutate_left(cur, it->i);
  return cur;
}

MutationSystem apply_braid(const MutationSystem& ms, const BraidWord& w) {
  const StokesData sd = apply_braid(derive_stokes(ms), w);
  MutationSystem out = ms;
  out.f = sd.f;
  out.tau = sd.tau;
  return out;
}

// ------------------------------------------------------------ reduced words

Inversions inversion_set(const Permutation& s) {
  Inversions inv;
  const int m = s.size();
  inv.at.resize(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (s.img[i] > s.img[j]) {
        inv.all.emplace_back(i + 1, j + 1);
        inv.at[i].push_back(j + 1);
      }
  return inv;
}

// Peel off the smallest right descent each time: s = s' o s_i.
BraidWord reduced_word_lift(const Permutation& s) {
  BraidWord w{s.size(), {}};
  Permutation cur = s;
  std::vector<int> tail;
  while (cur.length() > 0) {
    int i = 0;
    while (cur.img[i] < cur.img[i + 1]) ++i;
    tail.push_back(i + 1);
    std::swap(cur.img[i], cur.img[i + 1]);
  }
  for (auto it = tail.rbegin(); it != tail.rend(); ++it) w.letters.push_back({*it, 1});
  return w;
}

std::vector<BraidWord> all_reduced_words(const Permutation& s) {
  std::vector<BraidWord> out;
  if (s.length() == 0) return {BraidWord{s.size(), {}}};
  for (int i = 0; i + 1 < s.size(); ++i) {
    if (s.img[i] < s.img[i + 1]) continue;
    Permutation t = s;
    std::swap(t.img[i], t.img[i + 1]);
    for (auto w : all_reduced_words(t)) {
      w.letters.push_back({i + 1, 1});
      out.push_back(std::move(w));
    }
  }
  return out;
}

BraidWord delta_word(int m) { return reduced_word_lift(Permutation::longest(m)); }

StokesData delta_action(const StokesData& sd) { return apply_braid(sd, delta_word(sd.m())); }

// ------------------------------------------------------------ Stokes factors

static std::vector<int> offsets(const std::vector<int>& dims_in_order) {
  std::vector<int> o(dims_in_order.size() + 1, 0);
  for (size_t k = 0; k < dims_in_order.size(); ++k) o[k + 1] = o[k] + dims_in_order[k];
  return o;
}

// dims are per exponent index; layout follows tau.
static bool block_pattern_ok(const CMat& g, const Ordering& tau, const std::vector<int>& dims,
                             const std::function<bool(int, int)>& allowed, double tol) {
  std::vector<int> d;
  for (int c : tau.seq) d.push_back(dims[c]);
  const auto off = offsets(d);
  if (g.rows() != off.back() || g.cols() != off.back()) return false;
  const double scale = std::max(1.0, g.norm());
  for (int a = 0; a < tau.size(); ++a)
    for (int b = 0; b < tau.size(); ++b) {
      // block (row a, col b) is g_{cc'} with c = tau(b), c' = tau(a)
      auto blk = g.block(off[a], off[b], d[a], d[b]);
      if (a == b) {
        if ((blk - CMat::Identity(d[a], d[a])).norm() > tol * scale) return false;
      } else if (!allowed(tau.at(b), tau.at(a)) && blk.norm() > tol * scale) {
        return false;
      }
    }
  return true;
}

bool in_stokes_multipliers(const CMat& g, const ExponentSet& C, const Ordering& tau,
                           const std::vector<int>& dims, double theta, double tol) {
  return block_pattern_ok(
      g, tau, dims, [&](int c, int c2) { return !lt_theta(C.value(c2), C.value(c), theta + kPi / 2); },
      tol);
}

bool in_stokes_factors(const CMat& g, const ExponentSet& C, const Ordering& tau,
                       const std::vector<int>& dims, double theta, double tol) {
  const auto R = r_theta(C, theta);
  return block_pattern_ok(
      g, tau, dims,
      [&](int c, int c2) { return std::find(R.begin(), R.end(), std::make_pair(c, c2)) != R.end(); },
      tol);
}

CMat recompose(const std::vector<StokesFactor>& factors, int n) {
  CMat g = CMat::Identity(n, n);
  for (const auto& f : factors) g = f.g * g;
  return g;
}

std::vector<StokesFactor> factorize_stokes_multiplier(const CMat& g, const ExponentSet& C,
                                                      const std::vector<int>& dims, double theta0,
                                                      double tol) {
  const Ordering tau = tau_theta(C, theta0);
  if (!in_stokes_multipliers(g, C, tau, dims, theta0, tol))
    fail(ErrorKind::precondition, "multiplier is not in Sm(theta0)");
  const auto angles = crossing_angles(C, theta0);
  const int m = C.size();
  std::vector<int> d;
  for (int c : tau.seq) d.push_back(dims[c]);
  const auto off = offsets(d);
  const int n = off.back();
  std::vector<StokesFactor> fac;
  std::vector<int> owner(m * m, -1);  // (row pos, col pos) -> factor index
  for (size_t k = 0; k < angles.size(); ++k) {
    fac.push_back({angles[k], CMat::Identity(n, n)});
    const auto pos = tau.positions();
    for (auto [c, c2] : r_theta(C, angles[k])) owner[pos[c2] * m + pos[c]] = static_cast<int>(k);
  }
  for (int gap = 1; gap < m; ++gap)
    for (int col = 0; col + gap < m; ++col) {
      const int row = col + gap, k = owner[row * m + col];
      if (k < 0) fail(ErrorKind::numerical, "pair without a crossing angle");
      const CMat cur = recompose(fac, n);
      fac[k].g.block(off[row], off[col], d[row], d[col]) =
          g.block(off[row], off[col], d[row], d[col]) - cur.block(off[row], off[col], d[row], d[col]);
    }
  return fac;
}

// ------------------------------------------------------------ reindexing

// One step theta -> theta' with theta >= theta' >= theta - pi.
static BraidWord step_word(const ExponentSet& C, double from, double to) {
  const Permutation s = relative(tau_theta(C, to), tau_theta(C, from));
  return reduced_word_lift(s);
}

BraidWord reindex_word(const ExponentSet& C, double from, double to) {
  if (!is_generic(from, C) || !is_generic(to, C))
    fail(ErrorKind::precondition, "reindex endpoints must be C-generic");
  BraidWord total{C.size(), {}};
  double cur = from;
  while (std::abs(cur - to) > kTolAngle) {
    double next;
    BraidWord w;
    if (to < cur) {
      next = std::max(to, cur - kPi);
      w = step_word(C, cur, next);
    } else {
      next = std::min(to, cur + kPi);
      w = step_word(C, next, cur).inverse();
    }
    total = total.then(w);
    cur = next;
  }
  return total;
}

StokesData reindex(const StokesStructure& ss, double theta_new) {
  return apply_braid(ss.base, reindex_word(ss.base.C, ss.theta_ref, theta_new));
}

StokesData assemble_theta_bullet(const StokesStructure& ss, const DirectionTuple& t) {
  const ExponentSet& C = ss.base.C;
  if (!is_ordered(t, C)) fail(ErrorKind::precondition, "direction tuple is not ordered");
  StokesData out = ss.base;
  out.tau = tau_theta_bullet(t, C);
  std::map<double, StokesData> cache;
  for (int c = 0; c < C.size(); ++c) {
    const double a = t.per_exponent[c];
    auto it = cache.find(a);
    if (it == cache.end()) it = cache.emplace(a, reindex(ss, a)).first;
    out.f[c] = it->second.f[c];
    out.fstar[c] = it->second.fstar[c];
  }
  return out;
}

CMat gram_matrix(const MutationSystem& ms, const std::vector<CMat>& block_bases) {
  std::vector<CMat> cols;
  int n = 0;
  for (int c : ms.tau.seq) {
    CMat v = block_bases.empty() ? ms.f[c] : CMat(ms.f[c] * block_bases[c]);
    n += v.cols();
    cols.push_back(std::move(v));
  }
  CMat F(ms.dim(), n);
  int k = 0;
  for (auto& v : cols) {
    F.middleCols(k, v.cols()) = v;
    k += v.cols();
  }
  return F.transpose() * ms.P * F;
}

// ------------------------------------------------------------ random data

static CMat random_matrix(std::mt19937_64& rng, int r, int c) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CMat A(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) A(i, j) = cplx(u(rng), u(rng));
  return A;
}

static CMat random_invertible(std::mt19937_64& rng, int n) {
  // well away from singular: identity plus a modest perturbation
  return CMat::Identity(n, n) + 0.5 * random_matrix(rng, n, n);
}

// Unitriangular in the block layout given by dims (tau order).
static CMat random_block_unitriangular(std::mt19937_64& rng, const std::vector<int>& dims, bool lower) {
  const auto off = offsets(dims);
  const int n = off.back();
  CMat A = CMat::Identity(n, n);
  for (size_t a = 0; a < dims.size(); ++a)
    for (size_t b = 0; b < dims.size(); ++b)
      if ((lower && a > b) || (!lower && a < b))
        A.block(off[a], off[b], dims[a], dims[b]) = random_matrix(rng, dims[a], dims[b]);
  return A;
}

ExponentSet generic_exponents(int m) {
  std::vector<Exponent> e;
  for (int k = 0; k < m; ++k)
    e.push_back({fmt::format("c{}", k), std::polar(1.0 + 0.37 * k, 2 * kPi * k / m + 0.3)});
  return ExponentSet(e);
}

template <class V>
static V reseat(const V& v, const Ordering& from, const Ordering& to) {
  V out(v.size());
  for (int k = 0; k < to.size(); ++k)
    if (static_cast<size_t>(from.seq[k]) < v.size()) out[to.seq[k]] = v[from.seq[k]];
  return out;
}

StokesData with_exponents(const StokesData& sd, const ExponentSet& C, const Ordering& tau) {
  if (C.size() != sd.m() || tau.size() != sd.m()) fail(ErrorKind::structural, "exponent count mismatch");
  StokesData out = sd;
  out.C = C;
  out.tau = tau;
  out.f = reseat(sd.f, sd.tau, tau);
  out.fstar = reseat(sd.fstar, sd.tau, tau);
  out.Tc = reseat(sd.Tc, sd.tau, tau);
  if (!sd.block_grading.empty()) out.block_grading = reseat(sd.block_grading, sd.tau, tau);
  return out;
}

MutationSystem with_exponents(const MutationSystem& ms, const ExponentSet& C, const Ordering& tau) {
  if (C.size() != ms.m() || tau.size() != ms.m()) fail(ErrorKind::structural, "exponent count mismatch");
  MutationSystem out = ms;
  out.C = C;
  out.tau = tau;
  out.f = reseat(ms.f, ms.tau, tau);
  if (!ms.block_grading.empty()) out.block_grading = reseat(ms.block_grading, ms.tau, tau);
  return out;
}

StokesData random_stokes_data(std::mt19937_64& rng, const std::vector<int>& dims) {
  const int m = static_cast<int>(dims.size());
  const auto off = offsets(dims);
  const int n = off.back();
  StokesData sd;
  sd.C = generic_exponents(m);
  sd.tau.seq.resize(m);
  for (int k = 0; k < m; ++k) sd.tau.seq[k] = k;
  const CMat F = random_invertible(rng, n);
  const CMat L = random_block_unitriangular(rng, dims, true);
  const CMat U = random_block_unitriangular(rng, dims, false);
  CMat Tsum = CMat::Zero(n, n);
  sd.Tc.resize(m);
  for (int c = 0; c < m; ++c) {
    sd.Tc[c] = random_invertible(rng, dims[c]);
    Tsum.block(off[c], off[c], dims[c], dims[c]) = sd.Tc[c];
  }
  auto Flu = F.partialPivLu();
  const CMat Finv = Flu.inverse();
  const CMat Fstar = L * Finv;
  sd.T = F * L.triangularView<Eigen::Lower>().solve(Tsum * U * Finv);
  sd.f.resize(m);
  sd.fstar.resize(m);
  for (int c = 0; c < m; ++c) {
    sd.f[c] = F.middleCols(off[c], dims[c]);
    sd.fstar[c] = Fstar.middleRows(off[c], dims[c]);
  }
  return sd;
}

MutationSystem random_mutation_system(std::mt19937_64& rng, const std::vector<int>& dims) {
  const int m = static_cast<int>(dims.size());
  const auto off = offsets(dims);
  const int n = off.back();
  MutationSystem ms;
  ms.C = generic_exponents(m);
  ms.tau.seq.resize(m);
  for (int k = 0; k < m; ++k) ms.tau.seq[k] = k;
  const CMat F = random_invertible(rng, n);
  CMat Gup = random_block_unitriangular(rng, dims, false);
  for (int c = 0; c < m; ++c)
    Gup.block(off[c], off[c], dims[c], dims[c]) = random_invertible(rng, dims[c]);
  const CMat Finv = F.partialPivLu().inverse();
  ms.P = Finv.transpose() * Gup * Finv;
  ms.f.resize(m);
  for (int c = 0; c < m; ++c) ms.f[c] = F.middleCols(off[c], dims[c]);
  return ms;
}

}  // namespace sm
