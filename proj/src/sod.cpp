#include "stokes_mutant/sod.hpp"

#include <fmt/format.h>

#include "stokes_mutant/quantum.hpp"
#include "stokes_mutant/subspace.hpp"

namespace sm {

MukaiLine mukai_line(const CohomologyModel& X, int k) {
  return {k, mukai_vector(X, k), gamma_ch(X, k)};
}

double semiorthogonality_defect(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau) {
  const auto pos = tau.positions();
  double worst = 0;
  for (size_t a = 0; a < blocks.size(); ++a)
    for (size_t b = 0; b < blocks.size(); ++b) {
      if (pos[a] <= pos[b] || blocks[a].cols() == 0 || blocks[b].cols() == 0) continue;
      const double s = blocks[a].norm() * P.norm() * blocks[b].norm();
      worst = std::max(worst, (blocks[a].transpose() * P * blocks[b]).norm() / s);
    }
  return worst;
}

CMat residual_subspace(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau,
                       int slot_exponent, const std::vector<int>& parity, double tol) {
  std::vector<CMat> lines = blocks;
  lines[slot_exponent] = CMat(P.rows(), 0);
  if (semiorthogonality_defect(P, lines, tau) > tol)
    fail(ErrorKind::precondition, "lines are not semiorthogonal in the given order");
  int used = 0;
  for (const auto& b : lines) used += static_cast<int>(b.cols());
  const int expect = static_cast<int>(P.rows()) - used;
  try {
    return extract_zero_block(P, lines, tau, slot_exponent, parity, expect);
  } catch (const Error&) {
    fail(ErrorKind::validation, "residual subspace has a dimension shortfall");
  }
}

MutationSystem build_b_mutation_system(const CompleteIntersection& ci, const DirectionTuple& t) {
  const CohomologyModel X(ci, true);
  MutationSystem ms;
  ms.C = exponents(ci);
  if (!is_ordered(t, ms.C)) fail(ErrorKind::precondition, "direction tuple is not ordered");
  ms.tau = tau_theta_bullet(t, ms.C);
  ms.P = X.pairing_B();
  ms.grading = X.parity;
  ms.side = "B";
  const int m = ms.C.size();
  ms.f.assign(m, CMat(X.n, 0));
  ms.block_grading.assign(m, {});
  int zero = -1;
  for (int c = 0; c < m; ++c) {
    const std::string& id = ms.C[c].id;
    if (id == "o") {
      zero = c;
      continue;
    }
    if (id.size() < 2 || id[0] != 'k')
      fail(ErrorKind::precondition, "B-system needs r_X >= 2 exponents");
    const int k = std::stoi(id.substr(1));
    ms.f[c] = mukai_line(X, k).pre;
    ms.block_grading[c] = {0};
  }
  if (zero >= 0) {
    ms.f[zero] = residual_subspace(ms.P, ms.f, ms.tau, zero, X.parity);
    for (int j = 0; j < ms.f[zero].cols(); ++j) {
      int g = 0;
      for (int i = 0; i < X.n; ++i)
        if (std::abs(ms.f[zero](i, j)) > 0 && X.parity[i]) g = 1;
      ms.block_grading[zero].push_back(g);
    }
  }
  const Report r = validate_mutation_system(ms, 1e-9);
  if (!r.ok()) fail(ErrorKind::validation, "B-mutation system invariants fail:\n" + r.text());
  return ms;
}

std::vector<CMat> mutate_subspaces(const CMat& P, std::vector<CMat> blocks, Ordering& tau,
                                   const BraidWord& w) {
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
    const int i = it->i;  // swaps positions i, i+1 (1-based)
    const int a = tau.seq[i - 1], b = tau.seq[i];
    CMat span(P.rows(), blocks[a].cols() + blocks[b].cols());
    span << blocks[a], blocks[b];
    if (it->sign > 0) {
      // a moves behind b: [new a, b> = 0
      const CMat rows = blocks[b].transpose() * P.transpose() * span;
      blocks[a] = orth(span * null_space(rows));
    } else {
      // b moves in front of a: [a, new b> = 0
      const CMat rows = blocks[a].transpose() * P * span;
      blocks[b] = orth(span * null_space(rows));
    }
    std::swap(tau.seq[i - 1], tau.seq[i]);
  }
  return blocks;
}

Report braid_compatibility_check(const MutationSystem& ms, const BraidWord& w, double tol) {
  Report r;
  const MutationSystem moved = apply_braid(ms, w);
  Ordering tau = ms.tau;
  const auto sub = mutate_subspaces(ms.P, ms.f, tau, w);
  double worst = 0;
  for (int c = 0; c < ms.m(); ++c) worst = std::max(worst, subspace_distance(sub[c], moved.f[c]));
  r.add(fmt::format("orthogonality re-solve = apply_braid ({})", w.str()), worst, tol);
  r.add("orderings agree", tau == moved.tau ? 0.0 : 1.0, 0.5);
  return r;
}

}  // namespace sm
