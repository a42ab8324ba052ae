#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dcal/simgen.hpp"

namespace dcal {

/// Pure-sampling reference error: the relative root mean squared error an
/// SRSWOR mean-type estimator of size n would achieve on the whole
/// population, sqrt((N − n)/(N n)) · CV_Y.
double rrmse_benchmark(std::size_t n_total, std::size_t n, double cv_y);

/// Order-independent content hash of a frame (flags, y, z, x per unit),
/// rendered as 16 hex digits; identifies the frame a result row came from.
std::string frame_fingerprint(const Frame& frame);

/// Monte Carlo summary for one (scenario frame, sample size) combination.
/// All metrics are percentages.
struct CellRow {
    double rho_xy = 0.0;
    double rho_zy = 0.0;
    double rho_xz = 0.0;
    std::size_t n_resp = 0;
    std::size_t n = 0;
    std::size_t replicates = 0;
    std::size_t n_failed = 0; // replicates lost to singular fits, excluded
    bool valid = true;        // false when > 1% of replicates failed
    double rb_pct = 0.0;      // (mean(T̂) − T_Y)/T_Y
    double arrmse_pct = 0.0;  // sqrt(approximate variance)/T_Y
    double rrmse_pct = 0.0;   // sqrt(mean((T̂ − T_Y)²))/T_Y
    double benchmark_pct = 0.0;
    double errmsee_pct = 0.0; // mean of the per-replicate V̂/T̂
    double cov95_pct = 0.0;   // share of T̂ ± 2V̂ intervals covering T_Y
    double approx_rb_pct = 0.0;
    std::uint64_t seed = 0; // stream seed governing this row's replicates
    std::string fingerprint;
};

/// Runs `replicates` SRSWOR draws of size n on the frame: each replicate
/// computes the double-calibration total and its variance estimate, failed
/// (singular) replicates are counted and excluded. The benchmark column
/// uses the scenario's target CV_Y so it depends only on (N, n, CV_Y).
CellRow run_cell(const GeneratedFrame& frame, std::size_t n, std::size_t replicates,
                 std::uint64_t row_seed);

/// Full simulation grid: the cross of the correlation lists and respondent
/// counts, each cell generating one frame reused across all sample sizes.
struct GridSpec {
    std::vector<double> rho_xy_values{0.3, 0.6, 0.9};
    std::vector<double> rho_zy_values{0.3, 0.6, 0.9};
    std::vector<std::size_t> n_resp_values{2250, 4500, 6750};
    std::vector<std::size_t> sample_sizes{75, 100, 150, 250, 375, 500};
    std::size_t n_total = 10000;
    std::size_t n_b = 7500;
    std::size_t replicates = 2000;
    std::uint64_t master_seed = 1;
    RhoXzPolicy rho_xz_policy = RhoXzPolicy::GridFeasible;
    double rho_xz_value = 0.0;
    double epsilon = 1e-3;
    double grid_step = 0.1;
    MomentSpec moments;
    unsigned threads = 0; // 0 = hardware concurrency
};

struct GridResult {
    GridSpec spec;
    std::vector<CellRow> rows; // cell-major, sample sizes ascending within a cell
};

/// Deterministic given the master seed regardless of thread count: every
/// cell derives its own seed from the master seed and its coordinates.
GridResult run_grid(const GridSpec& spec);

/// Machine-readable output: one row per CellRow, fixed formatting.
void write_grid_csv(const GridResult& result, std::ostream& out);

/// Aligned text panels, one per scenario cell: columns n, RB, ARRMSE,
/// RRMSE (benchmark), ERRMSEE, COV95, one decimal.
void write_grid_table(const GridResult& result, std::ostream& out);

} // namespace dcal
