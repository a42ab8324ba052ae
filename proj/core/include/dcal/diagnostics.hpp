#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dcal/estimators.hpp"
#include "dcal/frame.hpp"

namespace dcal {

/// One population-stratum regression; coeffs is empty when the stratum is
/// empty or its gram matrix singular, with the reason recorded.
struct StratumFit {
    std::optional<std::vector<double>> coeffs;
    std::string note; // why unavailable, empty otherwise
};

/// The five anchor regressions of the bias analysis: y on x over the
/// respondent stratum (b_r) and over covered nonrespondents (b_nr); y on z
/// over the respondent stratum (d_r), the covered sub-population (d_b) and
/// its uncovered complement (d_nb). All unweighted least squares.
struct PopulationRegressions {
    StratumFit b_r;
    StratumFit b_nr;
    StratumFit d_r;
    StratumFit d_b;
    StratumFit d_nb;
};

PopulationRegressions population_regressions(const Frame& frame);

/// Additive decomposition of the first-order bias AE − T_Y:
///   term_nonresponse   = (b_R − b_NR)ᵗ T_X(NR)
///   term_condition2    = (d_R − d_B)ᵗ (T_Z − T_Z(B))
///   term_undercoverage = (d_B − d_NB)ᵗ (T_Z − T_Z(B))
/// Each term is zero by convention when its stratum is empty (the paired
/// total is then a zero vector).
struct BiasTerms {
    double term_nonresponse = 0.0;
    double term_condition2 = 0.0;
    double term_undercoverage = 0.0;
};

BiasTerms bias_decomposition(const Frame& frame, const TotalsBundle& totals);

/// First-order expectation of the double-calibration estimator and its
/// bias against the true total, with the anchor regressions and the bias
/// decomposition. Requires a frame carrying y on every unit.
struct BiasReport {
    double ae = 0.0;        // b_Rᵗ T_X(B) + d_Rᵗ(T_Z − T_Z(B))
    double t_y = 0.0;
    double t_y_b = 0.0;
    double approx_rb = 0.0; // (ae − t_y)/t_y
    PopulationRegressions regressions;
    BiasTerms terms;
};

BiasReport approximate_expectation(const Frame& frame, const TotalsBundle& totals);

} // namespace dcal
