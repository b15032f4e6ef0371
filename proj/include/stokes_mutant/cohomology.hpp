#pragma once

#include <cstdint>

#include "stokes_mutant/types.hpp"

namespace sm {

struct CompleteIntersection {
  int N = 1;
  std::vector<int> degrees;  // empty: X = P^N

  static CompleteIntersection projective(int n) { return {n, {}}; }
  int dim() const { return N - static_cast<int>(degrees.size()); }
  int index() const;
  std::int64_t degree() const;
  double D() const;       // prod d_i^{d_i}
  double Dprime() const;  // prod d_i!
  bool is_projective_space() const { return degrees.empty(); }
  std::string name() const;
  void validate() const;  // standing assumptions; P^n is always admitted
};

// Truncated power series a_0 + a_1 H + ... + a_d H^d.
class HPoly {
 public:
  explicit HPoly(int d = 0) : c_(d + 1, cplx(0.0)) {}
  HPoly(int d, std::vector<cplx> coeffs);
  static HPoly one(int d);
  static HPoly monomial(int d, int j, cplx a = 1.0);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](int j) const { return c_[j]; }
  cplx& operator[](int j) { return c_[j]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  HPoly operator+(const HPoly& o) const;
  HPoly operator-(const HPoly& o) const;
  HPoly operator*(const HPoly& o) const;
  HPoly operator*(cplx s) const;
  HPoly exp() const;      // requires a_0 = 0
  HPoly log() const;      // requires a_0 = 1
  HPoly inverse() const;  // requires a_0 != 0
  HPoly sqrt() const;     // requires a_0 = 1
  HPoly twisted() const;  // H^p coefficient times (2 pi i)^p
  HPoly reflected() const;  // H -> -H
  double max_abs_diff(const HPoly& o) const;

 private:
  std::vector<cplx> c_;
};

// H^*(X) = ambient (1, H, ..., H^d) followed by primitive e_1..e_b, all as
// column vectors of length d + 1 + b.
struct CohomologyModel {
  CompleteIntersection ci;
  int d = 0;       // dim X
  int b = 0;       // primitive rank
  int n = 0;       // total rank
  int prim_parity = 0;
  CMat gram;       // Poincare pairing: int a u b = a^T gram b
  std::vector<int> parity;  // per basis vector

  // Without the primitive part only the ambient block is modelled; the two
  // blocks are orthogonal, so ambient pairings are unchanged.
  explicit CohomologyModel(const CompleteIntersection& ci, bool with_primitive = true);
  CVec ambient(const HPoly& p) const;  // embed, primitive part zero
  HPoly ambient_part(const CVec& v) const;
  cplx integrate_top(const CVec& v) const;  // top ambient coefficient times deg
  CMat mu() const;
  CMat rho() const;  // c1 cup, classical
  CMat mult(const HPoly& p) const;  // cup with an ambient class
  CMat W() const;
  CMat pairing_A() const;  // [a,b) = a^T P_A b
  CMat pairing_B() const;  // [a,b> = a^T P_B b
  CMat serre_monodromy() const;
  CMat exp_rho(cplx t) const;  // e^{t rho}
};

struct ChernData {
  HPoly total;                   // c(TX)
  std::vector<double> power_sums;  // p_j / H^j for j = 0..d (p_0 = dim)
};

ChernData chern_data(const CompleteIntersection& ci);
std::vector<std::int64_t> chern_integers(const CompleteIntersection& ci);  // c_j(TX)/H^j
HPoly gamma_class(const CompleteIntersection& ci);
HPoly todd_class(const CompleteIntersection& ci, bool twist);
HPoly sqrt_todd(const CompleteIntersection& ci, bool twist);
HPoly chern_character(const CompleteIntersection& ci, int k, bool twist);
cplx integrate(const CohomologyModel& X, const CVec& a);
cplx pairing_A(const CohomologyModel& X, const CVec& a, const CVec& b);
cplx pairing_B(const CohomologyModel& X, const CVec& a, const CVec& b);

enum class GammaConvention { todd, sqrt_todd };
struct GammaChoice {
  GammaConvention convention = GammaConvention::sqrt_todd;
  bool twist = true;
  std::string str() const;
};

CMat gamma_matrix(const CohomologyModel& X, GammaChoice g);
CVec gamma_map(const CohomologyModel& X, const CVec& a, GammaChoice g);

// Gamma-hat Ch(O(k)) with twisted Ch, and the Mukai vector Ch(O(k)) sqrt(Td).
CVec gamma_ch(const CohomologyModel& X, int k);
CVec mukai_vector(const CohomologyModel& X, int k);

cplx euler_chi_pairing(const CohomologyModel& X, int k1, int k2);
std::int64_t euler_chi_hrr(const CompleteIntersection& ci, int k1, int k2);  // exact
cplx euler_chi(const CohomologyModel& X, int k1, int k2, double tol = 1e-9);  // cross-checked

std::int64_t topological_euler(const CompleteIntersection& ci);
// Every admissible (N; d_1..d_k) with N <= max_n, P^n excluded.
std::vector<CompleteIntersection> fano_complete_intersections(int max_n);
int primitive_dim(const CompleteIntersection& ci);

struct ConventionTrial {
  GammaChoice choice;
  double worst_residual = 0;
  bool pass = false;
};
struct ConventionResolution {
  std::vector<ConventionTrial> trials;
  GammaChoice selected;
  bool unique = false;
  std::string text() const;
};
// Pairing compatibility [Ga, Gb) = [a, b> on random class pairs for each candidate; dimension >= 2 only.
ConventionResolution resolve_gamma_convention(const std::vector<CompleteIntersection>& samples,
                                              int pairs, std::uint64_t seed, double tol = 1e-9);
double pairing_compat_residual(const CohomologyModel& X, GammaChoice g, const CVec& a, const CVec& b);

}  // namespace sm
