#include "dcal/variance.hpp"

#include <cmath>

namespace dcal {

namespace {

/// Shared kernel: u_j from residual terms against the two fits. The g
/// vectors are A⁻¹T_X(B) and C⁻¹(T_Z − T_Z(B)) for whichever (exact or
/// plug-in) quantities the caller uses.
double influence_value(const UnitRecord& u, const CalibrationFit& fit_x,
                       const CalibrationFit& fit_z, std::span<const double> g_x,
                       std::span<const double> g_z) {
    double value = -dot(fit_z.coeffs, u.z);
    if (u.r) {
        const double res_x = *u.y - dot(fit_x.coeffs, *u.x);
        const double res_z = *u.y - dot(fit_z.coeffs, u.z);
        value += res_x * dot(*u.x, g_x) + res_z * dot(u.z, g_z);
    }
    return value;
}

std::vector<double> totals_gap(std::span<const double> t_z, std::span<const double> t_z_b) {
    std::vector<double> gap(t_z.size());
    for (std::size_t m = 0; m < t_z.size(); ++m) gap[m] = t_z[m] - t_z_b[m];
    return gap;
}

double variance_about_mean(std::span<const double> values, std::size_t denominator) {
    NeumaierSum mean_sum;
    for (double v : values) mean_sum.add(v);
    const double mean = mean_sum.value() / static_cast<double>(values.size());
    NeumaierSum ss;
    for (double v : values) ss.add((v - mean) * (v - mean));
    return ss.value() / static_cast<double>(denominator);
}

double srswor_reduction(std::span<const double> values, std::size_t n_b, std::size_t n,
                        std::size_t variance_denominator) {
    const double s2 = variance_about_mean(values, variance_denominator);
    return static_cast<double>(n_b) * static_cast<double>(n_b - n) * s2 /
           static_cast<double>(n);
}

} // namespace

InfluenceSet influence_population(const Frame& frame, const TotalsBundle& totals) {
    InfluenceSet out;
    out.kind = InfluenceKind::Population;
    out.fit_x = fit_population(frame, Basis::X, [](const UnitRecord& u) { return u.r; },
                               "respondent stratum (X basis)");
    out.fit_z = fit_population(frame, Basis::Z, [](const UnitRecord& u) { return u.r; },
                               "respondent stratum (Z basis)");
    out.t_x_b = totals.t_x_b;
    out.t_z = totals.t_z;
    out.t_z_b_used = totals.t_z_b;

    const std::vector<double> g_x = solve_spd(out.fit_x.gram, out.t_x_b);
    const std::vector<double> g_z = solve_spd(out.fit_z.gram, totals_gap(out.t_z, out.t_z_b_used));

    out.values.resize(frame.n_b());
    for (std::size_t k = 0; k < frame.n_b(); ++k) {
        out.values[k] = influence_value(frame.b_unit(k), out.fit_x, out.fit_z, g_x, g_z);
    }
    return out;
}

InfluenceSet influence_empirical(const Frame& frame, const SampleDraw& sample,
                                 const Design& design, const TotalsBundle& totals) {
    InfluenceSet out;
    out.kind = InfluenceKind::Empirical;
    out.fit_x = fit_regression(frame, sample, Subset::Respondents, Basis::X, design);
    out.fit_z = fit_regression(frame, sample, Subset::Respondents, Basis::Z, design);
    out.t_x_b = totals.t_x_b;
    out.t_z = totals.t_z;

    out.t_z_b_used.assign(frame.z_dim(), 0.0);
    for (std::size_t k : sample.indices) {
        const UnitRecord& u = frame.b_unit(k);
        const double w = 1.0 / design.pi(k);
        for (std::size_t m = 0; m < frame.z_dim(); ++m) out.t_z_b_used[m] += w * u.z[m];
    }

    const std::vector<double> g_x = solve_spd(out.fit_x.gram, out.t_x_b);
    const std::vector<double> g_z = solve_spd(out.fit_z.gram, totals_gap(out.t_z, out.t_z_b_used));

    out.values.resize(sample.indices.size());
    for (std::size_t s = 0; s < sample.indices.size(); ++s) {
        out.values[s] =
            influence_value(frame.b_unit(sample.indices[s]), out.fit_x, out.fit_z, g_x, g_z);
    }
    return out;
}

double approx_variance(const InfluenceSet& u, const Design& design) {
    if (u.kind != InfluenceKind::Population) {
        throw NumericalError("approx_variance needs population influence values");
    }
    if (u.values.size() != design.n_b()) {
        throw NumericalError("approx_variance: influence length " +
                             std::to_string(u.values.size()) + " != design N_B " +
                             std::to_string(design.n_b()));
    }
    if (design.n_b() < 2) return 0.0; // no pairs
    if (design.kind() == Design::Kind::Srswor) {
        return srswor_reduction(u.values, design.n_b(), design.n(), design.n_b() - 1);
    }
    return approx_variance_pairwise(u, design);
}

double approx_variance_pairwise(const InfluenceSet& u, const Design& design) {
    const std::size_t n_b = design.n_b();
    NeumaierSum total;
    for (std::size_t j = 0; j < n_b; ++j) {
        const double ej = u.values[j] / design.pi(j);
        for (std::size_t h = j + 1; h < n_b; ++h) {
            const double coeff = design.pi(j) * design.pi(h) - design.pi_joint(j, h);
            const double diff = ej - u.values[h] / design.pi(h);
            total.add(coeff * diff * diff);
        }
    }
    return total.value();
}

double syg_variance(const InfluenceSet& u_hat, const Design& design, const SampleDraw& sample) {
    if (u_hat.kind != InfluenceKind::Empirical) {
        throw NumericalError("syg_variance needs empirical influence values");
    }
    if (u_hat.values.size() != sample.indices.size()) {
        throw NumericalError("syg_variance: influence length does not match the sample");
    }
    if (sample.indices.size() < 2) {
        throw NumericalError("syg_variance needs at least two sampled units");
    }
    if (design.kind() == Design::Kind::Srswor) {
        return srswor_reduction(u_hat.values, design.n_b(), design.n(),
                                sample.indices.size() - 1);
    }
    return syg_variance_pairwise(u_hat, design, sample);
}

double syg_variance_pairwise(const InfluenceSet& u_hat, const Design& design,
                             const SampleDraw& sample) {
    const std::size_t n = sample.indices.size();
    NeumaierSum total;
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t j = sample.indices[a];
        const double ej = u_hat.values[a] / design.pi(j);
        for (std::size_t b = a + 1; b < n; ++b) {
            const std::size_t h = sample.indices[b];
            const double pjh = design.pi_joint(j, h);
            if (!(pjh > 0.0)) {
                throw NumericalError("syg_variance: pi_joint(" + std::to_string(j) + "," +
                                     std::to_string(h) + ") must be positive for sampled pairs");
            }
            const double coeff = (design.pi(j) * design.pi(h) - pjh) / pjh;
            const double diff = ej - u_hat.values[b] / design.pi(h);
            total.add(coeff * diff * diff);
        }
    }
    return total.value();
}

EstimateReport finalize_report(double total, double variance, std::size_t n_respondents,
                               const std::string& design_summary) {
    if (variance < 0.0) {
        throw NumericalError("finalize_report: negative variance " + std::to_string(variance));
    }
    EstimateReport report;
    report.total = total;
    report.variance = variance;
    report.se = std::sqrt(variance);
    if (total != 0.0) report.rrmse = report.se / total;
    report.ci_low = total - 2.0 * report.se;
    report.ci_high = total + 2.0 * report.se;
    report.n_respondents = n_respondents;
    report.design_summary = design_summary;
    return report;
}

} // namespace dcal
