#pragma once

#include <cstddef>
#include <vector>

#include "dcal/design.hpp"
#include "dcal/estimators.hpp"
#include "dcal/frame.hpp"

namespace dcal {

enum class InfluenceKind { Population, Empirical };

/// First-order (Taylor) influence values of the double-calibration
/// estimator, plus the fits and totals they were built from. Population
/// values cover every covered unit (length N_B, frame order);
/// empirical values cover the sampled units (length n, sample order).
struct InfluenceSet {
    std::vector<double> values;
    InfluenceKind kind = InfluenceKind::Population;
    CalibrationFit fit_x;
    CalibrationFit fit_z;
    std::vector<double> t_x_b;
    std::vector<double> t_z;
    std::vector<double> t_z_b_used; // exact T_Z(B) or its HT estimate
};

/// Exact influence values
///   u_j = r_j (y_j − bᵗx_j)(x_jᵗ A⁻¹ T_X(B))
///       + r_j (y_j − dᵗz_j)(z_jᵗ C⁻¹ (T_Z − T_Z(B))) − dᵗz_j
/// with A, C, b, d from unweighted sums over the respondent stratum.
/// Nonrespondent units keep only the −dᵗz_j term.
InfluenceSet influence_population(const Frame& frame, const TotalsBundle& totals);

/// Same structure with plug-in quantities: π-weighted respondent fits and
/// the HT estimate of T_Z(B).
InfluenceSet influence_empirical(const Frame& frame, const SampleDraw& sample,
                                 const Design& design, const TotalsBundle& totals);

/// Approximate design variance Σ_{h>j∈U_B} (π_jπ_h − π_jh)(u_j/π_j − u_h/π_h)².
/// For SRSWOR this collapses to N_B(N_B − n)·S_u²/n with S_u² the
/// (N_B − 1)-denominator variance of the influence values, computed in
/// O(N_B); other designs use the pairwise double sum.
double approx_variance(const InfluenceSet& u, const Design& design);

/// The O(N_B²) double sum, any fixed-size design; kept separate so the
/// SRSWOR shortcut can be validated against it.
double approx_variance_pairwise(const InfluenceSet& u, const Design& design);

/// Sen–Yates–Grundy variance estimator
///   Σ_{h>j∈S} ((π_jπ_h − π_jh)/π_jh)(û_j/π_j − û_h/π_h)²,
/// which under SRSWOR reduces to N_B(N_B − n)·s_û²/n with s_û² the sample
/// variance of the empirical influence values; the reduction is used there,
/// the pairwise form elsewhere. Requires π_jh > 0 on sampled pairs.
double syg_variance(const InfluenceSet& u_hat, const Design& design, const SampleDraw& sample);

/// Pairwise SYG form, any design; validation target for the SRSWOR
/// reduction.
double syg_variance_pairwise(const InfluenceSet& u_hat, const Design& design,
                             const SampleDraw& sample);

/// Wraps a point estimate and a variance estimate into the reporting form:
/// se = sqrt(variance), rrmse = se/total (unset at total = 0),
/// ci = total ± 2 se.
EstimateReport finalize_report(double total, double variance, std::size_t n_respondents = 0,
                               const std::string& design_summary = "");

} // namespace dcal
