#pragma once

#include <iosfwd>

#include "dcal/diagnostics.hpp"
#include "dcal/run_config.hpp"
#include "dcal/variance.hpp"

namespace dcal {

/// Estimates a total from a sample CSV plus supplied register totals.
/// Every number in the rendered output comes from the returned report.
struct EstimateOutput {
    EstimateReport report;
    DcalEstimate estimate;
};

EstimateOutput run_estimate(const RunConfig& config);
void render_estimate(const EstimateOutput& output, const std::string& format,
                     std::ostream& out);

/// Runs the configured simulation grid; when config.out is set, writes
/// <out>.csv and <out>.txt, otherwise the text table goes to `table_out`.
GridResult run_simulate(const RunConfig& config, std::ostream& table_out);

/// Bias diagnostics on a ground-truth frame: from config.input when set,
/// otherwise on a freshly generated scenario (the grid lists must then be
/// single-valued).
BiasReport run_diagnose(const RunConfig& config);
void render_bias(const BiasReport& report, const std::string& format, std::ostream& out);

} // namespace dcal
