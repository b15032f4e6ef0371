#pragma once

#include <array>
#include <map>
#include <utility>

#include "stokes_mutant/types.hpp"

namespace sm {

inline constexpr double kTolAngle = 1e-9;

struct Exponent {
  std::string id;
  cplx value;
};

// Finite set of pairwise distinct exponents. Position in the set is the
// internal index everywhere else in the library.
class ExponentSet {
 public:
  ExponentSet() = default;
  explicit ExponentSet(std::vector<Exponent> entries);

  int size() const { return static_cast<int>(e_.size()); }
  const Exponent& operator[](int i) const { return e_[i]; }
  cplx value(int i) const { return e_[i].value; }
  int index_of(const std::string& id) const;
  const std::vector<Exponent>& entries() const { return e_; }

 private:
  std::vector<Exponent> e_;
};

// seq[k] is the exponent at position k (0-based), so tau(c) = pos(c) + 1.
struct Ordering {
  std::vector<int> seq;

  int size() const { return static_cast<int>(seq.size()); }
  int at(int k) const { return seq[k]; }
  std::vector<int> positions() const;
  bool operator==(const Ordering&) const = default;
};

// Angles unreduced; per_exponent is indexed like the ExponentSet.
struct DirectionTuple {
  double theta_ref = 0.0;
  std::vector<double> per_exponent;

  DirectionTuple() = default;
  DirectionTuple(double ref, std::vector<double> angles);
  static DirectionTuple constant(double theta, int m) {
    return DirectionTuple(theta, std::vector<double>(m, theta));
  }
  static DirectionTuple from_map(double ref, const std::map<std::string, double>& by_id,
                                 const ExponentSet& C);
};

bool leq_theta(cplx c, cplx c2, double theta);
bool lt_theta(cplx c, cplx c2, double theta);  // strict part

std::array<double, 2> stokes_directions(cplx c, cplx c2);

bool is_generic(double theta, const ExponentSet& C, double tol = kTolAngle);

Ordering tau_theta(const ExponentSet& C, double theta, double tol = kTolAngle);

// Half-line definition, and the two-case characterization kept separately so
// the two can be compared.
bool lt_theta_bullet(int c, int c2, const DirectionTuple& t, const ExponentSet& C,
                     double tol = kTolAngle);
bool lt_theta_bullet_cases(int c, int c2, const DirectionTuple& t, const ExponentSet& C,
                           double tol = kTolAngle);

bool in_range(const DirectionTuple& t, double tol = kTolAngle);
bool is_ordered(const DirectionTuple& t, const ExponentSet& C, double tol = kTolAngle);
Ordering tau_theta_bullet(const DirectionTuple& t, const ExponentSet& C, double tol = kTolAngle);

std::vector<std::pair<int, int>> r_theta(const ExponentSet& C, double theta,
                                         double tol = kTolAngle);

std::vector<double> crossing_angles(const ExponentSet& C, double theta0,
                                    double tol = kTolAngle);

// Distance from x to the lattice a + period*Z.
double dist_mod(double x, double a, double period);

}  // namespace sm
