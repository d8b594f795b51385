#include "slqg/wellposed.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>

namespace slqg {

namespace {

constexpr double kZeroTol = 1e-14;

bool d2_identically_zero(const CoefficientTable& table) {
  return std::all_of(table.begin(), table.end(), [](const CoefficientSet& c) {
    return c.D2.norm() <= kZeroTol;
  });
}

}  // namespace

const char* to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::case_i: return "case_i";
    case CaseLabel::case_ii: return "case_ii";
    case CaseLabel::case_iii: return "case_iii";
    default: return "unclassified";
  }
}

std::vector<std::pair<double, double>> s_curve(const GameSpec& spec,
                                               const TimeGrid& grid) {
  const CoefficientTable table = sample_coefficients(spec, grid);
  std::vector<std::pair<double, double>> out;
  out.reserve(table.size());
  for (int j = 0; j < static_cast<int>(table.size()); ++j) {
    const CoefficientSet& c = table[j];
    const SpdInverse r2inv = spd_inverse(symmetrize(c.R2), "R2", j);
    const Eigen::MatrixXd S =
        symmetrize(c.B2 * r2inv.inverse * c.B2.transpose());
    out.emplace_back(grid.node(j), min_eigenvalue(S));
  }
  return out;
}

WellPosednessReport classify(const GameSpec& spec, const TimeGrid& grid,
                             bool smoothness_asserted) {
  WellPosednessReport rep;
  rep.smoothness_asserted = smoothness_asserted;
  rep.case_label = CaseLabel::unclassified;

  const CoefficientTable table = sample_coefficients(spec, grid);
  const bool scalar = spec.dims.n == 1 && spec.dims.m1 == 1 && spec.dims.m2 == 1;
  const bool d2_zero = d2_identically_zero(table);

  double d2_lb = std::numeric_limits<double>::infinity();
  for (const CoefficientSet& c : table) {
    d2_lb = std::min(d2_lb, c.D2.norm());
  }
  rep.d2_lower_bound = d2_zero ? 0.0 : d2_lb;

  // Constant coefficients are trivially smooth in time.
  rep.smoothness_heuristic = spec.coeffs.is_constant();

  if (scalar && !d2_zero && d2_lb > 0.0) {
    rep.case_label = CaseLabel::case_i;
    return rep;
  }
  if (scalar && d2_zero) {
    rep.case_label = CaseLabel::case_ii;
    return rep;
  }

  if (d2_zero) {
    // Full-rank B2 at every node plus a strictly positive controllability
    // curve B2 R2^{-1} B2'.
    bool rank_ok = true;
    double s_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < static_cast<int>(table.size()); ++j) {
      const CoefficientSet& c = table[j];
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.B2);
      if (svd.rank() < spec.dims.n) rank_ok = false;
      const SpdInverse r2inv = spd_inverse(symmetrize(c.R2), "R2", j);
      s_min = std::min(
          s_min, min_eigenvalue(symmetrize(c.B2 * r2inv.inverse *
                                           c.B2.transpose())));
    }
    rep.rank_ok = rank_ok;
    rep.s_min_eig = s_min;
    if (rank_ok && smoothness_asserted && s_min > 0.0) {
      rep.case_label = CaseLabel::case_iii;
    }
  }
  return rep;
}

}  // namespace slqg
