#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dcal/frame.hpp"
#include "dcal/linalg.hpp"
#include "dcal/rng.hpp"

namespace dcal {

/// How the X–Z correlation is chosen. The bias/variance targets pin only
/// the X–Y and Z–Y correlations; ρ_XZ merely has to keep the covariance
/// matrix positive definite.
///  - Explicit: use rho_xz_value as given (validated).
///  - MinimalFeasible: the open lower bound plus epsilon.
///  - GridFeasible: the smallest nonnegative multiple of grid_step that is
///    strictly feasible, falling back to MinimalFeasible when even the
///    maximal multiple below 1 is infeasible (cannot happen for |ρ| < 1).
enum class RhoXzPolicy { Explicit, MinimalFeasible, GridFeasible };

/// Target moments of the generating distribution (X, Z, Y order).
struct MomentSpec {
    double mean_x = 1.0, mean_z = 1.0, mean_y = 2.0;
    double var_x = 1.0, var_z = 1.0, var_y = 4.0;

    double target_cv_y() const { return std::sqrt(var_y) / mean_y; }
};

/// One simulated population: N units, the first n_b covered, the first
/// n_resp of those forming the respondent stratum.
struct ScenarioConfig {
    std::size_t n_total = 10000;
    std::size_t n_b = 7500;
    std::size_t n_resp = 2250;
    double rho_xy = 0.3;
    double rho_zy = 0.3;
    RhoXzPolicy rho_xz_policy = RhoXzPolicy::GridFeasible;
    double rho_xz_value = 0.0; // Explicit policy
    double epsilon = 1e-3;     // MinimalFeasible offset
    double grid_step = 0.1;    // GridFeasible step
    MomentSpec moments;
};

/// Open lower bound on ρ_XZ keeping the 3×3 correlation matrix positive
/// definite: ρ_XYρ_ZY − sqrt((1 − ρ_XY²)(1 − ρ_ZY²)).
double min_feasible_rho_xz(double rho_xy, double rho_zy);

/// Determinant of the 3×3 correlation matrix
/// 1 − ρ_XY² − ρ_ZY² − ρ_XZ² + 2ρ_XYρ_ZYρ_XZ.
double correlation_determinant(double rho_xy, double rho_zy, double rho_xz);

/// Applies the configured policy. Throws NumericalError naming the minimal
/// feasible value when an explicit ρ_XZ is infeasible.
double resolve_rho_xz(const ScenarioConfig& config);

/// 3×3 covariance (X, Z, Y order) from the configured correlations and
/// moments; positive definiteness verified by factorization.
SymMatrix build_covariance(const ScenarioConfig& config);

struct AchievedMoments {
    double mean_x = 0.0, mean_z = 0.0, mean_y = 0.0;
    double corr_xy = 0.0, corr_zy = 0.0, corr_xz = 0.0;
};

/// A generated frame plus its ground truth (the quantities the Monte Carlo
/// metrics are judged against) and generation metadata.
struct GeneratedFrame {
    Frame frame; // with the unit-constant convention applied (K = M = 2)
    TotalsBundle totals;
    double t_y = 0.0;
    double t_y_b = 0.0;
    double cv_y = 0.0; // realized population CV of y
    double rho_xz_used = 0.0;
    ScenarioConfig config;
    AchievedMoments achieved;
};

/// Draws N iid trivariate-normal units via the Cholesky factor of the
/// covariance, keeps x only on the covered prefix, and wraps the result
/// with the unit constant. Deterministic given the rng state.
GeneratedFrame generate_population(const ScenarioConfig& config, Rng& rng);

} // namespace dcal
