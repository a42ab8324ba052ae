#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dcal/commands.hpp"

namespace {

// Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical error.
int exit_code(dcal::ErrorCategory category) {
    switch (category) {
        case dcal::ErrorCategory::Config: return 2;
        case dcal::ErrorCategory::Data: return 3;
        case dcal::ErrorCategory::Numerical: return 4;
    }
    return 4;
}

const char* category_name(dcal::ErrorCategory category) {
    switch (category) {
        case dcal::ErrorCategory::Config: return "config";
        case dcal::ErrorCategory::Data: return "data";
        case dcal::ErrorCategory::Numerical: return "numerical";
    }
    return "numerical";
}

struct CommonFlags {
    std::string config_path;
    std::string seed, replicates, out, format;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value configuration file");
        cmd->add_option("--seed", seed, "master seed override");
        cmd->add_option("--replicates", replicates, "replicate count override");
        cmd->add_option("--out", out, "output path override");
        cmd->add_option("--format", format, "output format override (table|csv)");
    }

    dcal::RunConfig resolve() const {
        dcal::RunConfig config;
        if (!config_path.empty()) config = dcal::parse_config_file(config_path);
        if (!seed.empty()) dcal::apply_setting(config, "seed", seed);
        if (!replicates.empty()) dcal::apply_setting(config, "replicates", replicates);
        if (!out.empty()) dcal::apply_setting(config, "out", out);
        if (!format.empty()) dcal::apply_setting(config, "format", format);
        return config;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design-based estimation of totals under cut-off-sampling under-coverage "
                 "and unit nonresponse (double calibration)"};
    app.require_subcommand(1);

    CommonFlags estimate_flags, simulate_flags, diagnose_flags;
    CLI::App* estimate = app.add_subcommand(
        "estimate", "Estimate a total from a sample CSV plus supplied register totals");
    estimate_flags.attach(estimate);
    CLI::App* simulate =
        app.add_subcommand("simulate", "Run the Monte Carlo scenario grid");
    simulate_flags.attach(simulate);
    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "Population bias diagnostics on a ground-truth frame");
    diagnose_flags.attach(diagnose);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (estimate->parsed()) {
            const dcal::RunConfig config = estimate_flags.resolve();
            const dcal::EstimateOutput output = dcal::run_estimate(config);
            if (config.out.empty()) {
                dcal::render_estimate(output, config.format, std::cout);
            } else {
                std::ofstream file(config.out);
                if (!file) throw dcal::DataError("cannot open output file '" + config.out + "'");
                dcal::render_estimate(output, config.format, file);
            }
        } else if (simulate->parsed()) {
            dcal::run_simulate(simulate_flags.resolve(), std::cout);
        } else if (diagnose->parsed()) {
            const dcal::RunConfig config = diagnose_flags.resolve();
            const dcal::BiasReport report = dcal::run_diagnose(config);
            if (config.out.empty()) {
                dcal::render_bias(report, config.format, std::cout);
            } else {
                std::ofstream file(config.out);
                if (!file) throw dcal::DataError("cannot open output file '" + config.out + "'");
                dcal::render_bias(report, config.format, file);
            }
        }
    } catch (const dcal::Error& e) {
        std::cerr << "error (" << category_name(e.category()) << "): " << e.what() << '\n';
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error (numerical): " << e.what() << '\n';
        return 4;
    }
    return 0;
}
