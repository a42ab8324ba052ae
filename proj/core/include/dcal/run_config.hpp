#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcal/frame.hpp"
#include "dcal/mc.hpp"

namespace dcal {

/// Everything a command run needs, assembled from a flat key=value config
/// file plus command-line overrides. Unknown keys and malformed values are
/// config errors.
struct RunConfig {
    // input/output
    std::string input;            // CSV path (estimate, diagnose)
    ColumnMap columns;            // x/z column lists via x_cols=, z_cols=
    bool add_intercept = true;    // prepend the unit constant on load
    std::string out;              // output path; simulate appends .csv/.txt
    std::string format = "table"; // table | csv

    // design and supplied totals (estimate)
    std::string design = "srswor"; // srswor | census
    std::size_t n_b = 0;           // N_B backing the design
    std::vector<double> t_x_b;     // supplied T_X(B), intercept component first
    std::vector<double> t_z;       // supplied T_Z

    // simulation grid; diagnose without an input file generates the
    // single scenario these lists describe (each must then have length 1)
    GridSpec grid;
};

/// Parses `key = value` lines ('#' comments, blank lines ignored).
RunConfig parse_config_file(const std::string& path);

/// Applies one key=value setting; shared by the file parser and CLI
/// overrides. Throws ConfigError naming the key on unknown keys or
/// malformed values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

} // namespace dcal
