#pragma once

#include "stokes_mutant/quantum.hpp"
#include "stokes_mutant/sod.hpp"

namespace sm {

// theta_o = theta0, theta_{c_k} = theta0 - 2 pi k / r
DirectionTuple center_tuple(const ExponentSet& C, int r, double theta0);
// theta_c clamped from below at theta0 - pi
DirectionTuple clamped_tuple(const DirectionTuple& t, double theta0);

struct InversionCheck {
  std::string id;
  std::vector<int> lhs, rhs, closed;  // ordered
  bool ok() const { return lhs == rhs && lhs == closed; }
};
// {c' : c <_{theta0} c', c' <_{phi} c} against the per-exponent order phi_c.
std::vector<InversionCheck> first_inversion_identity(const ExponentSet& C, int r, double theta0);
// {c' : c <_{phi} c', c' <_{theta} c} against phi_c / theta_c, as ordered sets.
std::vector<InversionCheck> second_inversion_identity(const ExponentSet& C, int r, double theta0);

std::string fmt_set(const ExponentSet& C, const std::vector<int>& v);

struct DubrovinOptions {
  double theta0 = 0.1;
  IntegratorConfig cfg;
  double tol_cmp = 1e-3;
  double tol_residual = 1e-8;
  enum class Convention { a, b, automatic } convention = Convention::automatic;
  Exec exec = Exec::parallel;
};

struct BlockDistance {
  std::string id;
  int dim_a = 0, dim_b = 0;
  double distance = 0;  // sin of the largest principal angle
};

struct DubrovinReport {
  std::string variety;
  ExponentSet C;
  double theta0 = 0;
  GammaChoice gamma;
  std::string gamma_note;
  DirectionTuple theta_bullet, phi_bullet;
  BraidWord s_word, s_prime_word, sigma;
  std::vector<std::string> order_theta0, order_bullet;  // ids in tau order
  std::vector<BlockDistance> at_theta0;   // Im A f_{theta0} vs Gamma B (transported)
  std::vector<BlockDistance> at_bullet;   // Im A f_{theta_bullet} vs Gamma B
  double transport_phi = 0, transport_bullet = 0;  // braid transport of the A frame
  std::vector<std::string> line_ids;
  CMat gram_a, gram_b;  // line blocks, tau order of theta0
  double gram_distance = 0;
  double residual_consistency = 0;  // two perp computations of the residual
  std::vector<InversionCheck> inversions1, inversions2;
  double tol_cmp = 0, tol_residual = 0;
  IntegratorConfig cfg;
  std::size_t integrations = 0;
  bool verdict = false;

  double worst_distance() const;
  bool inversions_ok() const;
  std::string markdown() const;
};

DubrovinReport dubrovin_check(const CompleteIntersection& ci, const DubrovinOptions& opt);

}  // namespace sm
