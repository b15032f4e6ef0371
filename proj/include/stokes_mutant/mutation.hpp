#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "stokes_mutant/direction.hpp"

namespace sm {

inline constexpr double kTolLin = 1e-10;

struct Clause {
  std::string name;
  double residual = 0.0;
  bool ok = true;
};

struct Report {
  std::vector<Clause> clauses;
  bool ok() const;
  double worst() const;
  void add(std::string name, double residual, double tol);
  std::string text() const;
};

// Stokes data on (V, T). Blocks are stored per exponent index, not per
// position; tau says where each block sits.
struct StokesData {
  CMat T;
  ExponentSet C;
  Ordering tau;
  std::vector<CMat> Tc;     // d_c x d_c
  std::vector<CMat> f;      // n x d_c
  std::vector<CMat> fstar;  // d_c x n
  std::vector<int> grading;                     // parity per basis vector of V, empty if ungraded
  std::vector<std::vector<int>> block_grading;  // same per block

  int dim() const { return static_cast<int>(T.rows()); }
  int m() const { return C.size(); }
  int block_dim(int c) const { return static_cast<int>(f[c].cols()); }
  std::vector<int> block_dims_in_order() const;
  CMat f_matrix() const;      // columns in tau order
  CMat fstar_matrix() const;  // rows in tau order
  CMat Tc_sum() const;        // block diagonal in tau order
  CMat fshriek(int c) const;
};

struct MutationSystem {
  CMat P;  // P(v,w) = [v,w>
  ExponentSet C;
  Ordering tau;
  std::vector<CMat> f;
  std::vector<int> grading;
  std::vector<std::vector<int>> block_grading;
  std::string side;

  int dim() const { return static_cast<int>(P.rows()); }
  int m() const { return C.size(); }
  CMat f_matrix() const;
};

struct StokesStructure {
  StokesData base;
  double theta_ref = 0.0;
};

struct Letter {
  int i = 1;     // generator index, 1..m-1
  int sign = 1;  // +1 or -1
  bool operator==(const Letter&) const = default;
};

// sigma_{i1} o sigma_{i2} o ... : the rightmost letter acts first.
struct BraidWord {
  int m = 1;
  std::vector<Letter> letters;

  BraidWord inverse() const;
  BraidWord then(const BraidWord& later) const;  // later o this
  std::string str() const;
  static BraidWord parse(const std::string& text, int m);
  bool operator==(const BraidWord&) const = default;
};

// images are 0-based: s[k] is the image of k.
struct Permutation {
  std::vector<int> img;

  int size() const { return static_cast<int>(img.size()); }
  static Permutation identity(int m);
  static Permutation longest(int m);
  static Permutation transposition(int m, int i);  // s_i, 1-based, swaps i and i+1
  Permutation compose(const Permutation& right) const;  // this o right
  Permutation inverse() const;
  int length() const;
  bool operator==(const Permutation&) const = default;
};

// Permutation acting on an ordering: new position of the exponent at
// position k is s(k).
Ordering act(const Permutation& s, const Ordering& tau);
// s with act(s, from) == to.
Permutation relative(const Ordering& to, const Ordering& from);
Permutation underlying(const BraidWord& w);

Report validate_stokes_data(const StokesData& sd, double tol = kTolLin);
Report validate_mutation_system(const MutationSystem& ms, double tol = kTolLin);
void check_shapes(const StokesData& sd);

CMat derive_T(const MutationSystem& ms);
CMat block_pairing(const MutationSystem& ms, int c);
StokesData derive_stokes(const MutationSystem& ms);
MutationSystem with_pairing(const StokesData& sd, const CMat& P, std::string side = "");

struct MutationEndos {
  CMat R, Rstar, L, Lshriek;
};
// i is 1-based; R-type needs the block at position i, L-type likewise.
MutationEndos mutation_endos(const StokesData& sd, int i);

StokesData mutate_right(const StokesData& sd, int i);  // i in 2..m
StokesData mutate_left(const StokesData& sd, int i);   // i in 1..m-1
StokesData apply_braid(const StokesData& sd, const BraidWord& w);
MutationSystem apply_braid(const MutationSystem& ms, const BraidWord& w);

struct Inversions {
  std::vector<std::pair<int, int>> all;   // 1-based (i,j), i<j, s(i)>s(j)
  std::vector<std::vector<int>> at;       // at[i-1] = I_i(s)
};
Inversions inversion_set(const Permutation& s);
BraidWord reduced_word_lift(const Permutation& s);
std::vector<BraidWord> all_reduced_words(const Permutation& s);
BraidWord delta_word(int m);
StokesData delta_action(const StokesData& sd);

// Stokes factor groups on End(sum V_c), block matrices laid out in tau order
// of theta0 (the order used by the caller).
bool in_stokes_multipliers(const CMat& g, const ExponentSet& C, const Ordering& tau,
                           const std::vector<int>& dims, double theta, double tol = kTolLin);
bool in_stokes_factors(const CMat& g, const ExponentSet& C, const Ordering& tau,
                       const std::vector<int>& dims, double theta, double tol = kTolLin);

struct StokesFactor {
  double theta;
  CMat g;
};
// g = g_l o ... o g_1 with theta_1 > ... > theta_l; returned as [g_1..g_l].
std::vector<StokesFactor> factorize_stokes_multiplier(const CMat& g, const ExponentSet& C,
                                                      const std::vector<int>& dims,
                                                      double theta0, double tol = kTolLin);
CMat recompose(const std::vector<StokesFactor>& factors, int n);

StokesData reindex(const StokesStructure& ss, double theta_new);
BraidWord reindex_word(const ExponentSet& C, double theta_from, double theta_to);
StokesData assemble_theta_bullet(const StokesStructure& ss, const DirectionTuple& t);

CMat gram_matrix(const MutationSystem& ms, const std::vector<CMat>& block_bases = {});

// Random generators used by tests and the batch kernels.
StokesData random_stokes_data(std::mt19937_64& rng, const std::vector<int>& dims);
MutationSystem random_mutation_system(std::mt19937_64& rng, const std::vector<int>& dims);
ExponentSet generic_exponents(int m);
// Move the block at position k onto exponent tau.seq[k].
StokesData with_exponents(const StokesData& sd, const ExponentSet& C, const Ordering& tau);
MutationSystem with_exponents(const MutationSystem& ms, const ExponentSet& C, const Ordering& tau);

double rel_diff(const CMat& a, const CMat& b);
double stokes_diff(const StokesData& a, const StokesData& b);

}  // namespace sm
