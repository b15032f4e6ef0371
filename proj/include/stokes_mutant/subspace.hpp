#pragma once

#include "stokes_mutant/types.hpp"

namespace sm {

inline constexpr double kTolRank = 1e-9;

// Subspaces are carried as n x k basis matrices (k may be 0).
CMat orth(const CMat& A, double rel_tol = kTolRank);
CMat null_space(const CMat& M, double rel_tol = kTolRank);  // right kernel, orthonormal
CMat intersect(const CMat& A, const CMat& B, double rel_tol = kTolRank);

// sin of the largest principal angle; 1 when dimensions differ.
double subspace_distance(const CMat& A, const CMat& B);
double principal_angle(const CMat& A, const CMat& B);

// Kernel of M restricted to vectors supported on the coordinates with the
// given parity, computed separately per parity class.
CMat graded_null_space(const CMat& M, const std::vector<int>& parity, double rel_tol = kTolRank);

}  // namespace sm

namespace sm {

// max |s_i s_j G_ij - target_ij| over the best diagonal sign choice s (found
// greedily along the largest target entries of each column).
double gram_distance_up_to_signs(const CMat& G, const CMat& target);

}  // namespace sm
