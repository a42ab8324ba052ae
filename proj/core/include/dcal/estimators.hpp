#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcal/design.hpp"
#include "dcal/frame.hpp"
#include "dcal/linalg.hpp"

namespace dcal {

enum class Basis { X, Z };

/// Which units feed a regression fit: the sampled respondents, the whole
/// sample, or an unweighted population stratum (diagnostics).
enum class Subset { Respondents, FullSample, PopulationStratum };

/// A weighted least-squares fit: gram = Σ w v vᵗ, moment = Σ w y v,
/// coeffs = gram⁻¹ moment over the selected units.
struct CalibrationFit {
    SymMatrix gram;
    std::vector<double> moment;
    std::vector<double> coeffs;
    Basis basis = Basis::X;
    Subset subset = Subset::Respondents;
    std::size_t n_units = 0; // units contributing to the sums
};

/// Point estimate with variance, on the root scale for reporting:
/// se = sqrt(variance), ci = total ± 2 se. rrmse = se/total is left unset
/// when total is zero.
struct EstimateReport {
    double total = 0.0;
    double variance = 0.0;
    double se = 0.0;
    std::optional<double> rrmse;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_respondents = 0;
    std::string design_summary;
};

/// Horvitz-Thompson total Σ values_j / pi_j. All pi must be > 0.
double ht_total(std::span<const double> values, std::span<const double> pi);

/// Fits y on the chosen basis over the sampled units, weighting each
/// contribution by 1/pi (respondents-only when subset = Respondents).
/// Throws SingularSystem naming the basis and subset when the gram matrix
/// is not positive definite.
CalibrationFit fit_regression(const Frame& frame, const SampleDraw& sample, Subset subset,
                              Basis basis, const Design& design);

/// Unweighted least-squares fit over a population stratum (respondent
/// stratum, nonrespondents, the covered sub-population, its complement).
/// The label names the stratum in error messages.
CalibrationFit fit_population(const Frame& frame, Basis basis,
                              const std::function<bool(const UnitRecord&)>& in_stratum,
                              const std::string& stratum_label);

/// Nonresponse-corrected total b̂ᵗ T_X(B) from an X-basis respondent fit.
double first_calibration(const CalibrationFit& fit_x, std::span<const double> t_x_b);

/// The full-response calibration estimator computed both ways:
/// via_totals = d̂ᵗ T_Z and via_ht_correction = T̂_Y(B) + d̂ᵗ(T_Z − T̂_Z(B)).
/// With a leading unit constant in the z-basis the two forms coincide.
struct FullSampleCalibration {
    double via_totals = 0.0;
    double via_ht_correction = 0.0;
    CalibrationFit fit_z;
};

/// Requires y on every sampled unit (full-response or test context) and a
/// leading unit constant in z.
FullSampleCalibration virtual_calibration(const Frame& frame, const SampleDraw& sample,
                                          const Design& design, std::span<const double> t_z);

/// Point estimate of the double-calibration estimator together with the
/// two respondent fits and T̂_Z(B), which the variance estimator reuses.
struct DcalEstimate {
    double total = 0.0;
    CalibrationFit fit_x; // b̂ on respondents
    CalibrationFit fit_z; // d̂ on respondents
    std::vector<double> t_z_b_hat;
    std::size_t n_respondents = 0;
};

/// b̂ᵗ T_X(B) + d̂ᵗ(T_Z − T̂_Z(B)) with both fits on the sampled
/// respondents. Requires a nonempty respondent subset and a leading unit
/// constant in both bases.
DcalEstimate double_calibration(const Frame& frame, const SampleDraw& sample,
                                const Design& design, std::span<const double> t_x_b,
                                std::span<const double> t_z);

} // namespace dcal
