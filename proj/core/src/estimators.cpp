#include "dcal/estimators.hpp"

#include <cmath>

namespace dcal {

namespace {

const char* basis_name(Basis b) { return b == Basis::X ? "X" : "Z"; }

const char* subset_name(Subset s) {
    switch (s) {
        case Subset::Respondents: return "respondents";
        case Subset::FullSample: return "full sample";
        case Subset::PopulationStratum: return "population stratum";
    }
    return "?";
}

std::span<const double> basis_vector(const UnitRecord& u, Basis basis) {
    if (basis == Basis::X) {
        if (!u.x) throw DataError("unit '" + u.id + "' lacks an x-vector for an X-basis fit");
        return *u.x;
    }
    return u.z;
}

void require_unit_constant(const UnitRecord& u, Basis basis, const char* op) {
    const auto v = basis_vector(u, basis);
    if (v.empty() || v[0] != 1.0) {
        throw DataError(std::string(op) + " requires a leading unit constant in the " +
                        basis_name(basis) + " basis (unit '" + u.id +
                        "' has first component " + (v.empty() ? "<none>" : std::to_string(v[0])) +
                        "); build the frame with with_intercept or include a constant column");
    }
}

CalibrationFit solve_fit(SymMatrix gram, std::vector<double> moment, Basis basis, Subset subset,
                         std::size_t n_units) {
    CalibrationFit fit;
    fit.basis = basis;
    fit.subset = subset;
    fit.n_units = n_units;
    try {
        fit.coeffs = solve_spd(gram, moment);
    } catch (const SingularSystem& e) {
        throw SingularSystem(e.pivot_index(),
                             std::string("singular gram matrix in ") + basis_name(basis) +
                                 "-basis fit on " + subset_name(subset) + " (" +
                                 std::to_string(n_units) + " units): " + e.what());
    }
    fit.gram = std::move(gram);
    fit.moment = std::move(moment);
    return fit;
}

} // namespace

double ht_total(std::span<const double> values, std::span<const double> pi) {
    if (values.size() != pi.size()) {
        throw DataError("ht_total: values and pi must have equal length");
    }
    NeumaierSum s;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(pi[i] > 0.0)) {
            throw NumericalError("ht_total: pi[" + std::to_string(i) + "] = " +
                                 std::to_string(pi[i]) + " must be positive");
        }
        s.add(values[i] / pi[i]);
    }
    return s.value();
}

CalibrationFit fit_regression(const Frame& frame, const SampleDraw& sample, Subset subset,
                              Basis basis, const Design& design) {
    if (subset == Subset::PopulationStratum) {
        throw NumericalError("fit_regression handles sample-based fits; use fit_population "
                             "for population strata");
    }
    const std::size_t dim = basis == Basis::X ? frame.x_dim() : frame.z_dim();
    SymMatrix gram(dim);
    std::vector<double> moment(dim, 0.0);
    std::size_t n_units = 0;
    for (std::size_t k : sample.indices) {
        const UnitRecord& u = frame.b_unit(k);
        if (subset == Subset::Respondents && !u.r) continue;
        if (!u.y) {
            throw DataError("unit '" + u.id + "' contributes to a fit but has no observed y");
        }
        const double w = 1.0 / design.pi(k);
        const auto v = basis_vector(u, basis);
        gram.add_outer(v, w);
        const double wy = w * *u.y;
        for (std::size_t c = 0; c < dim; ++c) moment[c] += wy * v[c];
        ++n_units;
    }
    return solve_fit(std::move(gram), std::move(moment), basis, subset, n_units);
}

CalibrationFit fit_population(const Frame& frame, Basis basis,
                              const std::function<bool(const UnitRecord&)>& in_stratum,
                              const std::string& stratum_label) {
    const std::size_t dim = basis == Basis::X ? frame.x_dim() : frame.z_dim();
    SymMatrix gram(dim);
    std::vector<double> moment(dim, 0.0);
    std::size_t n_units = 0;
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        const UnitRecord& u = frame.unit(i);
        if (!in_stratum(u)) continue;
        if (!u.y) {
            throw DataError("unit '" + u.id + "' in stratum " + stratum_label +
                            " has no y value; population fits need the truth");
        }
        const auto v = basis_vector(u, basis);
        gram.add_outer(v, 1.0);
        for (std::size_t c = 0; c < dim; ++c) moment[c] += *u.y * v[c];
        ++n_units;
    }
    if (n_units == 0) {
        throw DataError("stratum " + stratum_label + " is empty; nothing to fit");
    }
    try {
        return solve_fit(std::move(gram), std::move(moment), basis,
                         Subset::PopulationStratum, n_units);
    } catch (const SingularSystem& e) {
        throw SingularSystem(e.pivot_index(), "stratum " + stratum_label + ": " + e.what());
    }
}

double first_calibration(const CalibrationFit& fit_x, std::span<const double> t_x_b) {
    if (fit_x.basis != Basis::X || fit_x.subset != Subset::Respondents) {
        throw NumericalError("first_calibration expects an X-basis respondent fit");
    }
    if (fit_x.coeffs.size() != t_x_b.size()) {
        throw NumericalError("first_calibration: coefficient/total dimension mismatch (" +
                             std::to_string(fit_x.coeffs.size()) + " vs " +
                             std::to_string(t_x_b.size()) + ")");
    }
    return dot(fit_x.coeffs, t_x_b);
}

FullSampleCalibration virtual_calibration(const Frame& frame, const SampleDraw& sample,
                                          const Design& design, std::span<const double> t_z) {
    if (t_z.size() != frame.z_dim()) {
        throw NumericalError("virtual_calibration: t_z dimension mismatch");
    }
    std::vector<double> y(sample.indices.size());
    std::vector<double> pi(sample.indices.size());
    std::vector<double> t_z_b_hat(frame.z_dim(), 0.0);
    for (std::size_t s = 0; s < sample.indices.size(); ++s) {
        const std::size_t k = sample.indices[s];
        const UnitRecord& u = frame.b_unit(k);
        require_unit_constant(u, Basis::Z, "virtual_calibration");
        if (!u.y) {
            throw DataError("virtual_calibration needs y on every sampled unit; unit '" + u.id +
                            "' has none");
        }
        y[s] = *u.y;
        pi[s] = design.pi(k);
        for (std::size_t m = 0; m < frame.z_dim(); ++m) t_z_b_hat[m] += u.z[m] / pi[s];
    }

    FullSampleCalibration out;
    out.fit_z = fit_regression(frame, sample, Subset::FullSample, Basis::Z, design);
    out.via_totals = dot(out.fit_z.coeffs, t_z);
    double correction = 0.0;
    for (std::size_t m = 0; m < frame.z_dim(); ++m) {
        correction += out.fit_z.coeffs[m] * (t_z[m] - t_z_b_hat[m]);
    }
    out.via_ht_correction = ht_total(y, pi) + correction;
    return out;
}

DcalEstimate double_calibration(const Frame& frame, const SampleDraw& sample,
                                const Design& design, std::span<const double> t_x_b,
                                std::span<const double> t_z) {
    if (t_x_b.size() != frame.x_dim()) {
        throw NumericalError("double_calibration: t_x_b dimension mismatch");
    }
    if (t_z.size() != frame.z_dim()) {
        throw NumericalError("double_calibration: t_z dimension mismatch");
    }
    DcalEstimate est;
    est.t_z_b_hat.assign(frame.z_dim(), 0.0);
    for (std::size_t k : sample.indices) {
        const UnitRecord& u = frame.b_unit(k);
        require_unit_constant(u, Basis::Z, "double_calibration");
        if (u.r) {
            require_unit_constant(u, Basis::X, "double_calibration");
            ++est.n_respondents;
        }
        const double w = 1.0 / design.pi(k);
        for (std::size_t m = 0; m < frame.z_dim(); ++m) est.t_z_b_hat[m] += w * u.z[m];
    }
    if (est.n_respondents == 0) {
        throw DataError("double_calibration: the sample contains no respondents");
    }
    est.fit_x = fit_regression(frame, sample, Subset::Respondents, Basis::X, design);
    est.fit_z = fit_regression(frame, sample, Subset::Respondents, Basis::Z, design);
    est.total = dot(est.fit_x.coeffs, t_x_b);
    for (std::size_t m = 0; m < frame.z_dim(); ++m) {
        est.total += est.fit_z.coeffs[m] * (t_z[m] - est.t_z_b_hat[m]);
    }
    return est;
}

} // namespace dcal
