#pragma once

#include <vector>

#include "slqg/game.hpp"

namespace slqg {

// Global well-posedness classes for which the backward sweep is guaranteed to
// stay in the positive-semidefinite region over the whole horizon:
//   case_i    scalar game with the follower diffusion weight bounded away
//             from zero, inf_t |D2(t)| > 0
//   case_ii   scalar game with D2 identically zero
//   case_iii  D2 identically zero, B2(t) of full row rank everywhere, and
//             B2, R2 continuously differentiable (user-attested)
enum class CaseLabel { case_i, case_ii, case_iii, unclassified };

const char* to_string(CaseLabel label);

struct WellPosednessReport {
  CaseLabel case_label = CaseLabel::unclassified;
  double d2_lower_bound = 0;       // inf over nodes of the smallest |D2| scale
  double s_min_eig = 0;            // inf over nodes of min eig of B2 R2^{-1} B2'
  bool rank_ok = false;            // rank B2(t) == n at every node
  bool smoothness_asserted = false;
  double smoothness_heuristic = 0;  // max second difference of B2, R2 entries
};

// Evaluates the cases in order (i), (ii), (iii) and returns the first match.
// Differentiability of B2, R2 cannot be verified from grid samples, so it is
// a caller attestation; a finite-difference heuristic is reported alongside
// but never drives the label.
WellPosednessReport classify(const GameSpec& spec, const TimeGrid& grid,
                             bool smoothness_asserted);

// Per-node (t, min eig of B2 R2^{-1} B2'). Throws Error(singularity) when R2
// is not invertible at some node.
std::vector<std::pair<double, double>> s_curve(const GameSpec& spec,
                                               const TimeGrid& grid);

}  // namespace slqg
