#pragma once

#include "stokes_mutant/cohomology.hpp"
#include "stokes_mutant/mutation.hpp"

namespace sm {

struct MukaiLine {
  int k = 0;
  CVec pre;   // nu(O(k)) = Ch(O(k)) sqrt(Td)
  CVec post;  // Gamma-hat Ch(O(k))
};

MukaiLine mukai_line(const CohomologyModel& X, int k);

// Two-sided complement under P: [z, e> = 0 for blocks before the slot and
// [l, z> = 0 for blocks after it. Lines must be pairwise semiorthogonal in
// tau order.
CMat residual_subspace(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau,
                       int slot_exponent, const std::vector<int>& parity, double tol = 1e-9);

// O(k) at exponent -T omega_k, the residual at 0, ordered by the tuple.
MutationSystem build_b_mutation_system(const CompleteIntersection& ci, const DirectionTuple& t);

// Semiorthogonality residual of a block family (max relative entry).
double semiorthogonality_defect(const CMat& P, const std::vector<CMat>& blocks, const Ordering& tau);

// Subspace-level mutation: re-solve orthogonality inside the span of the two
// swapped blocks.
std::vector<CMat> mutate_subspaces(const CMat& P, std::vector<CMat> blocks, Ordering& tau,
                                   const BraidWord& w);
Report braid_compatibility_check(const MutationSystem& ms, const BraidWord& w, double tol = 1e-9);

}  // namespace sm
