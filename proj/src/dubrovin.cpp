#include "stokes_mutant/dubrovin.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "stokes_mutant/subspace.hpp"

namespace sm {

namespace {

int twist_of(const ExponentSet& C, int c) {
  const auto& id = C[c].id;
  return id[0] == 'k' ? std::stoi(id.substr(1)) : -1;
}

bool lt(const ExponentSet& C, int a, int b, double theta) {
  return lt_theta(C.value(a), C.value(b), theta + kPi / 2);
}

template <class Less>
std::vector<int> sorted(std::vector<int> v, Less less) {
  std::sort(v.begin(), v.end(), less);
  return v;
}

std::vector<std::string> ids_in_order(const ExponentSet& C, const Ordering& tau) {
  std::vector<std::string> out;
  for (int c : tau.seq) out.push_back(C[c].id);
  return out;
}

std::string fmt_matrix(const CMat& m) {
  std::string s;
  for (int i = 0; i < m.rows(); ++i) {
    s += "    [";
    for (int j = 0; j < m.cols(); ++j) {
      const cplx v = m(i, j);
      s += fmt::format("{}{:.6g}", j ? ", " : "", v.real());
      if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v))) s += fmt::format("{:+.3g}i", v.imag());
    }
    s += "]\n";
  }
  return s;
}

double transport_distance(const MutationSystem& moved, const AsymptoticFrame& target) {
  if (!(moved.tau == target.tau)) return 1.0;
  double worst = 0;
  for (int c = 0; c < moved.m(); ++c)
    worst = std::max(worst, subspace_distance(moved.f[c], target.blocks[c]));
  return worst;
}

}  // namespace

std::string fmt_set(const ExponentSet& C, const std::vector<int>& v) {
  std::string s = "{";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + C[v[i]].id;
  return s + "}";
}

DirectionTuple center_tuple(const ExponentSet& C, int r, double theta0) {
  std::vector<double> a(C.size(), theta0);
  for (int c = 0; c < C.size(); ++c) {
    const int k = twist_of(C, c);
    if (k >= 0) a[c] = theta0 - 2 * kPi * k / r;
  }
  return DirectionTuple(theta0, a);
}

DirectionTuple clamped_tuple(const DirectionTuple& t, double theta0) {
  std::vector<double> a = t.per_exponent;
  for (double& x : a)
    if (x <= theta0 - kPi + kTolAngle) x = theta0 - kPi;
  return DirectionTuple(theta0, a);
}

std::vector<InversionCheck> first_inversion_identity(const ExponentSet& C, int r, double theta0) {
  const DirectionTuple th = center_tuple(C, r, theta0), phi = clamped_tuple(th, theta0);
  const int m = C.size();
  std::vector<InversionCheck> out;
  for (int c = 0; c < m; ++c) {
    InversionCheck ch;
    ch.id = C[c].id;
    auto by0 = [&](int a, int b) { return lt(C, a, b, theta0); };
    for (int d = 0; d < m; ++d) {
      if (d == c || !lt(C, c, d, theta0)) continue;
      if (lt_theta_bullet(d, c, phi, C)) ch.lhs.push_back(d);
      if (lt(C, d, c, phi.per_exponent[c])) ch.rhs.push_back(d);
    }
    const int k = twist_of(C, c);
    if (k >= 0) {
      const bool above = th.per_exponent[c] > theta0 - kPi + kTolAngle;
      for (int d = 0; d < m; ++d) {
        const int l = twist_of(C, d);
        if (d == c || l < 0 || !lt(C, c, d, theta0)) continue;
        if (!above || l < k) ch.closed.push_back(d);
      }
      if (!above)
        for (int d = 0; d < m; ++d)
          if (twist_of(C, d) < 0) ch.closed.push_back(d);
    }
    ch.lhs = sorted(ch.lhs, by0);
    ch.rhs = sorted(ch.rhs, by0);
    ch.closed = sorted(ch.closed, by0);
    out.push_back(std::move(ch));
  }
  return out;
}

std::vector<InversionCheck> second_inversion_identity(const ExponentSet& C, int r, double theta0) {
  const DirectionTuple th = center_tuple(C, r, theta0), phi = clamped_tuple(th, theta0);
  const int m = C.size();
  std::vector<InversionCheck> out;
  for (int c = 0; c < m; ++c) {
    InversionCheck ch;
    ch.id = C[c].id;
    const double pc = phi.per_exponent[c], tc = th.per_exponent[c];
    for (int d = 0; d < m; ++d) {
      if (d == c) continue;
      if (lt_theta_bullet(c, d, phi, C) && lt_theta_bullet(d, c, th, C)) ch.lhs.push_back(d);
      if (lt(C, c, d, pc) && lt(C, d, c, tc)) ch.rhs.push_back(d);
    }
    const int k = twist_of(C, c);
    if (k >= 0 && tc <= theta0 - kPi + kTolAngle)
      for (int d = 0; d < m; ++d) {
        const int l = twist_of(C, d);
        if (l >= 0 && l < k && lt(C, c, d, theta0 - kPi)) ch.closed.push_back(d);
      }
    ch.lhs = sorted(ch.lhs, [&](int a, int b) { return lt_theta_bullet(a, b, phi, C); });
    ch.rhs = sorted(ch.rhs, [&](int a, int b) { return lt(C, a, b, pc); });
    ch.closed = sorted(ch.closed, [&](int a, int b) { return lt(C, a, b, pc); });
    out.push_back(std::move(ch));
  }
  return out;
}

double DubrovinReport::worst_distance() const {
  double w = 0;
  for (const auto& d : at_theta0) w = std::max(w, d.distance);
  return w;
}

bool DubrovinReport::inversions_ok() const {
  auto all = [](const std::vector<InversionCheck>& v) {
    return std::all_of(v.begin(), v.end(), [](const InversionCheck& c) { return c.ok(); });
  };
  return all(inversions1) && all(inversions2);
}

static GammaChoice pick_gamma(const CompleteIntersection& ci, DubrovinOptions::Convention conv,
                              std::string& note) {
  switch (conv) {
    case DubrovinOptions::Convention::a:
      note = "forced a";
      return {GammaConvention::todd, true};
    case DubrovinOptions::Convention::b:
      note = "forced b";
      return {GammaConvention::sqrt_todd, true};
    default:
      break;
  }
  std::vector<CompleteIntersection> samples{CompleteIntersection::projective(2), {4, {3}}};
  if (ci.dim() >= 2) samples.push_back(ci);
  const auto res = resolve_gamma_convention(samples, 8, 5);
  if (!res.unique) fail(ErrorKind::numerical, "Gamma convention is not determined:\n" + res.text());
  note = "resolved by pairing compatibility";
  return res.selected;
}

DubrovinReport dubrovin_check(const CompleteIntersection& ci, const DubrovinOptions& opt) {
  DubrovinReport rep;
  rep.variety = ci.name();
  rep.theta0 = opt.theta0;
  rep.tol_cmp = opt.tol_cmp;
  rep.tol_residual = opt.tol_residual;
  rep.cfg = opt.cfg;
  rep.gamma = pick_gamma(ci, opt.convention, rep.gamma_note);

  const QuantumData q(ci);
  rep.C = q.exponents;
  const ExponentSet& C = rep.C;
  const int m = C.size(), z = q.zero_index();
  rep.theta_bullet = center_tuple(C, q.r, opt.theta0);
  rep.phi_bullet = clamped_tuple(rep.theta_bullet, opt.theta0);
  rep.inversions1 = first_inversion_identity(C, q.r, opt.theta0);
  rep.inversions2 = second_inversion_identity(C, q.r, opt.theta0);

  AsymptoticSolver solver(q, opt.cfg, opt.exec);
  std::vector<std::pair<int, double>> req;
  for (const DirectionTuple* t : {&rep.theta_bullet, &rep.phi_bullet})
    for (int c = 0; c < m; ++c)
      if (c != z) req.push_back({c, t->per_exponent[c]});
  for (int c = 0; c < m; ++c)
    if (c != z) req.push_back({c, opt.theta0});
  solver.prefetch(req);

  const AsymptoticFrame A0 = asymptotic_classes(solver, opt.theta0);
  const AsymptoticFrame Aphi = asymptotic_classes(solver, rep.phi_bullet);
  const AsymptoticFrame Ath = asymptotic_classes(solver, rep.theta_bullet);
  rep.integrations = solver.integrations();
  rep.order_theta0 = ids_in_order(C, A0.tau);
  rep.order_bullet = ids_in_order(C, Ath.tau);

  // A0 -> A_phi -> A_theta by the positive lifts of s and s'
  rep.s_word = reduced_word_lift(relative(Aphi.tau, A0.tau));
  rep.s_prime_word = reduced_word_lift(relative(Ath.tau, Aphi.tau));
  rep.sigma = rep.s_word.then(rep.s_prime_word);
  const MutationSystem sA0 = A0.system();
  const MutationSystem sAphi = apply_braid(sA0, rep.s_word);
  rep.transport_phi = transport_distance(sAphi, Aphi);
  rep.transport_bullet = transport_distance(apply_braid(Aphi.system(), rep.s_prime_word), Ath);

  const MutationSystem B = build_b_mutation_system(ci, rep.theta_bullet);
  const MutationSystem B0 = apply_braid(B, rep.sigma.inverse());
  const CMat G = gamma_matrix(q.X, rep.gamma);
  const CMat PA = q.X.pairing_A();

  for (int c = 0; c < m; ++c) {
    const CMat gb0 = G * B0.f[c], gb = G * B.f[c];
    rep.at_theta0.push_back({C[c].id, int(A0.blocks[c].cols()), int(gb0.cols()),
                             principal_angle(A0.blocks[c], gb0)});
    rep.at_bullet.push_back({C[c].id, int(Ath.blocks[c].cols()), int(gb.cols()),
                             principal_angle(Ath.blocks[c], gb)});
  }
  if (!(B0.tau == A0.tau)) rep.at_theta0.push_back({"order", 0, 0, 1.0});

  // Gram matrices of the line blocks, both normalized to [a, a) = 1
  std::vector<CVec> la, lb;
  for (int c : A0.tau.seq) {
    if (c == z) continue;
    rep.line_ids.push_back(C[c].id);
    la.push_back(A0.blocks[c].col(0));
    lb.push_back(normalize_line(G * B0.f[c].col(0), PA));
  }
  const int nl = la.size();
  rep.gram_a.resize(nl, nl);
  rep.gram_b.resize(nl, nl);
  for (int i = 0; i < nl; ++i)
    for (int j = 0; j < nl; ++j) {
      rep.gram_a(i, j) = (la[i].transpose() * PA * la[j])(0);
      rep.gram_b(i, j) = (lb[i].transpose() * PA * lb[j])(0);
    }
  rep.gram_distance = gram_distance_up_to_signs(rep.gram_a, rep.gram_b);

  // residual: complement of the Gamma lines under [.,.)_A vs Gamma of the B residual
  if (z >= 0) {
    std::vector<CMat> lines(m);
    for (int c = 0; c < m; ++c) lines[c] = G * B.f[c];
    try {
      rep.residual_consistency =
          subspace_distance(residual_subspace(PA, lines, B.tau, z, q.X.parity), lines[z]);
    } catch (const Error&) {
      rep.residual_consistency = 1.0;
    }
  }

  const double wb = std::max_element(rep.at_bullet.begin(), rep.at_bullet.end(),
                                     [](auto& a, auto& b) { return a.distance < b.distance; })
                        ->distance;
  rep.verdict = rep.worst_distance() <= opt.tol_cmp && wb <= opt.tol_cmp &&
                rep.gram_distance <= opt.tol_cmp && rep.transport_phi <= opt.tol_cmp &&
                rep.transport_bullet <= opt.tol_cmp &&
                rep.residual_consistency <= opt.tol_residual && rep.inversions_ok();
  return rep;
}

std::string DubrovinReport::markdown() const {
  std::ostringstream o;
  o << "# Dubrovin-type check: " << variety << "\n\n";
  o << fmt::format("- theta0 = {}\n- Gamma convention: {} ({})\n", theta0, gamma.str(), gamma_note);
  o << fmt::format("- integrator: rtol {:g}, atol {:g}, formal order {}, outer factor {:g}; {} ray integrations\n",
                   cfg.rtol, cfg.atol, cfg.order, cfg.outer_factor, integrations);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " < " : "") + v[i];
    return s;
  };
  o << "- order at theta0: " << join(order_theta0) << "\n";
  o << "- order at the center tuple: " << join(order_bullet) << "\n";
  o << "- s = " << s_word.str() << ", s' = " << s_prime_word.str() << ", sigma = " << sigma.str() << "\n";
  o << fmt::format("- tolerances: comparison {:g}, residual {:g}\n\n", tol_cmp, tol_residual);

  o << "## Blocks\n\n| exponent | dim A | dim Gamma B | distance at theta0 | distance at center tuple |\n"
       "|---|---|---|---|---|\n";
  for (size_t i = 0; i < at_theta0.size(); ++i) {
    const auto& d = at_theta0[i];
    const double db = i < at_bullet.size() ? at_bullet[i].distance : 0.0;
    o << fmt::format("| {} | {} | {} | {:.2e} | {:.2e} |\n", d.id, d.dim_a, d.dim_b, d.distance, db);
  }
  o << fmt::format("\nbraid transport of the A frame: to phi {:.2e}, to the center tuple {:.2e}\n",
                   transport_phi, transport_bullet);
  o << fmt::format("residual: two complement computations differ by {:.2e}\n\n", residual_consistency);

  std::string ids;
  for (size_t i = 0; i < line_ids.size(); ++i) ids += (i ? ", " : "") + line_ids[i];
  o << "## Gram matrices of the line blocks (" << ids << ")\n\nA side:\n" << fmt_matrix(gram_a)
    << "Gamma B side:\n" << fmt_matrix(gram_b)
    << fmt::format("up to signs: {:.2e}\n\n", gram_distance);

  o << "## Inversion sets\n\n";
  for (auto [name, v] : {std::pair{"first", &inversions1}, std::pair{"second", &inversions2}})
    for (const auto& c : *v)
      o << fmt::format("- {} {}: {} {} {}\n", name, c.id, c.ok() ? "ok" : "MISMATCH",
                       fmt_set(C, c.lhs), c.ok() ? "" : fmt::format("(rhs {}, closed form {})", fmt_set(C, c.rhs), fmt_set(C, c.closed)));
  o << "\n**verdict: " << (verdict ? "pass" : "fail") << "**\n";
  return o.str();
}

}  // namespace sm
