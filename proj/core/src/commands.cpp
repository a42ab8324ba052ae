#include "dcal/commands.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <numeric>
#include <ostream>

namespace dcal {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

std::string num(double v, const char* fmt = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string join(const std::vector<double>& v, const char* sep = ";") {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += num(v[i], "%.10g");
    }
    return out;
}

} // namespace

EstimateOutput run_estimate(const RunConfig& config) {
    require(!config.input.empty(), "estimate needs 'input' (sample CSV path)");
    require(!config.columns.x.empty(), "estimate needs 'x_cols'");
    require(!config.columns.z.empty(), "estimate needs 'z_cols'");
    require(config.n_b > 0, "estimate needs 'n_b' (size of the covered sub-population)");
    require(!config.t_x_b.empty(), "estimate needs 't_x_b' (supplied T_X(B))");
    require(!config.t_z.empty(), "estimate needs 't_z' (supplied T_Z)");

    const Frame frame = ingest_csv_file(config.input, config.columns, config.add_intercept);
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        if (!frame.unit(i).in_b) {
            throw DataError("sampled row '" + frame.unit(i).id +
                            "' lies outside U_B; estimation samples are drawn from U_B");
        }
    }
    require(config.t_x_b.size() == frame.x_dim(),
            "t_x_b has " + std::to_string(config.t_x_b.size()) + " components but the frame needs " +
                std::to_string(frame.x_dim()) +
                " (the leading unit-constant total N_B counts too when add_intercept=1)");
    require(config.t_z.size() == frame.z_dim(),
            "t_z has " + std::to_string(config.t_z.size()) + " components but the frame needs " +
                std::to_string(frame.z_dim()));

    const std::size_t n = frame.n_b();
    std::optional<Design> design;
    if (config.design == "census") {
        require(n == config.n_b, "census design requires the sample to cover all of U_B (" +
                                     std::to_string(n) + " rows vs n_b=" +
                                     std::to_string(config.n_b) + ")");
        design = Design::census(config.n_b);
    } else {
        if (!(n > 0 && n < config.n_b)) {
            throw ConfigError("SRSWOR needs 0 < n < n_b; the file has " + std::to_string(n) +
                              " sampled rows and n_b=" + std::to_string(config.n_b));
        }
        design = Design::srswor(config.n_b, n);
    }

    SampleDraw draw;
    draw.indices.resize(n);
    std::iota(draw.indices.begin(), draw.indices.end(), std::size_t{0});

    EstimateOutput out;
    out.estimate = double_calibration(frame, draw, *design, config.t_x_b, config.t_z);

    TotalsBundle totals;
    totals.t_x_b = config.t_x_b;
    totals.t_z = config.t_z;
    const InfluenceSet u_hat = influence_empirical(frame, draw, *design, totals);
    const double variance = syg_variance(u_hat, *design, draw);
    out.report = finalize_report(out.estimate.total, variance, out.estimate.n_respondents,
                                 design->summary());
    return out;
}

void render_estimate(const EstimateOutput& output, const std::string& format,
                     std::ostream& out) {
    const EstimateReport& r = output.report;
    if (format == "csv") {
        out << "total,se,variance,rrmse,ci_low,ci_high,n_respondents,design\n";
        out << num(r.total, "%.10g") << ',' << num(r.se, "%.10g") << ','
            << num(r.variance, "%.10g") << ',' << (r.rrmse ? num(*r.rrmse, "%.10g") : "") << ','
            << num(r.ci_low, "%.10g") << ',' << num(r.ci_high, "%.10g") << ','
            << r.n_respondents << ',' << r.design_summary << '\n';
        return;
    }
    out << "total          " << num(r.total, "%.2f") << '\n';
    out << "se             " << num(r.se, "%.2f") << '\n';
    out << "rrmse          " << (r.rrmse ? num(*r.rrmse, "%.2f") : "undefined (total = 0)")
        << '\n';
    out << "95% ci         [" << num(r.ci_low, "%.2f") << ", " << num(r.ci_high, "%.2f")
        << "]\n";
    out << "respondents    " << r.n_respondents << '\n';
    out << "design         " << r.design_summary << '\n';
}

GridResult run_simulate(const RunConfig& config, std::ostream& table_out) {
    require(!config.grid.rho_xy_values.empty(), "simulate needs 'rho_xy'");
    require(!config.grid.rho_zy_values.empty(), "simulate needs 'rho_zy'");
    require(!config.grid.n_resp_values.empty(), "simulate needs 'n_resp'");
    require(!config.grid.sample_sizes.empty(), "simulate needs 'sample_sizes'");

    const GridResult result = run_grid(config.grid);
    if (config.out.empty()) {
        if (config.format == "csv") write_grid_csv(result, table_out);
        else write_grid_table(result, table_out);
        return result;
    }
    const std::string csv_path = config.out + ".csv";
    const std::string txt_path = config.out + ".txt";
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot open output file '" + csv_path + "'");
    write_grid_csv(result, csv);
    std::ofstream txt(txt_path);
    if (!txt) throw DataError("cannot open output file '" + txt_path + "'");
    write_grid_table(result, txt);
    table_out << "wrote " << csv_path << " and " << txt_path << '\n';
    return result;
}

BiasReport run_diagnose(const RunConfig& config) {
    if (!config.input.empty()) {
        require(!config.columns.x.empty(), "diagnose needs 'x_cols'");
        require(!config.columns.z.empty(), "diagnose needs 'z_cols'");
        const Frame frame =
            ingest_csv_file(config.input, config.columns, config.add_intercept);
        return approximate_expectation(frame, compute_totals(frame));
    }
    const GridSpec& g = config.grid;
    require(g.rho_xy_values.size() == 1 && g.rho_zy_values.size() == 1 &&
                g.n_resp_values.size() == 1,
            "diagnose without 'input' generates one scenario: rho_xy, rho_zy and n_resp "
            "must be single values");
    ScenarioConfig scenario;
    scenario.n_total = g.n_total;
    scenario.n_b = g.n_b;
    scenario.n_resp = g.n_resp_values[0];
    scenario.rho_xy = g.rho_xy_values[0];
    scenario.rho_zy = g.rho_zy_values[0];
    scenario.rho_xz_policy = g.rho_xz_policy;
    scenario.rho_xz_value = g.rho_xz_value;
    scenario.epsilon = g.epsilon;
    scenario.grid_step = g.grid_step;
    scenario.moments = g.moments;
    Rng rng(mix_seed(mix_seed(mix_seed(mix_seed(g.master_seed, 0), 0), 0), 0));
    const GeneratedFrame frame = generate_population(scenario, rng);
    return approximate_expectation(frame.frame, frame.totals);
}

namespace {

void render_stratum(const char* name, const StratumFit& fit, const std::string& format,
                    std::ostream& out) {
    if (format == "csv") {
        out << name << ',' << (fit.coeffs ? join(*fit.coeffs) : "unavailable: " + fit.note)
            << '\n';
        return;
    }
    out << name << "   ";
    if (fit.coeffs) {
        out << '(';
        for (std::size_t i = 0; i < fit.coeffs->size(); ++i) {
            if (i) out << ", ";
            out << num((*fit.coeffs)[i]);
        }
        out << ")\n";
    } else {
        out << "unavailable: " << fit.note << '\n';
    }
}

} // namespace

void render_bias(const BiasReport& report, const std::string& format, std::ostream& out) {
    if (format == "csv") {
        out << "field,value\n";
        out << "ae," << num(report.ae, "%.10g") << '\n';
        out << "t_y," << num(report.t_y, "%.10g") << '\n';
        out << "t_y_b," << num(report.t_y_b, "%.10g") << '\n';
        out << "approx_rb_pct," << num(100.0 * report.approx_rb, "%.10g") << '\n';
        out << "term_nonresponse," << num(report.terms.term_nonresponse, "%.10g") << '\n';
        out << "term_condition2," << num(report.terms.term_condition2, "%.10g") << '\n';
        out << "term_undercoverage," << num(report.terms.term_undercoverage, "%.10g") << '\n';
        render_stratum("b_r", report.regressions.b_r, format, out);
        render_stratum("b_nr", report.regressions.b_nr, format, out);
        render_stratum("d_r", report.regressions.d_r, format, out);
        render_stratum("d_b", report.regressions.d_b, format, out);
        render_stratum("d_nb", report.regressions.d_nb, format, out);
        return;
    }
    out << "approximate expectation  " << num(report.ae, "%.2f") << '\n';
    out << "true total               " << num(report.t_y, "%.2f") << '\n';
    out << "covered-total truth      " << num(report.t_y_b, "%.2f") << '\n';
    out << "approximate rel. bias    " << num(100.0 * report.approx_rb, "%.1f") << "%\n";
    out << "bias terms:\n";
    out << "  nonresponse            " << num(report.terms.term_nonresponse, "%.2f") << '\n';
    out << "  condition-2 gap        " << num(report.terms.term_condition2, "%.2f") << '\n';
    out << "  under-coverage         " << num(report.terms.term_undercoverage, "%.2f") << '\n';
    out << "regressions:\n";
    render_stratum("  b_R ", report.regressions.b_r, format, out);
    render_stratum("  b_NR", report.regressions.b_nr, format, out);
    render_stratum("  d_R ", report.regressions.d_r, format, out);
    render_stratum("  d_B ", report.regressions.d_b, format, out);
    render_stratum("  d_NB", report.regressions.d_nb, format, out);
}

} // namespace dcal
