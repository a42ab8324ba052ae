#include "dcal/diagnostics.hpp"

#include <cmath>

#include "dcal/linalg.hpp"

namespace dcal {

namespace {

StratumFit try_stratum(const Frame& frame, Basis basis,
                       bool (*in_stratum)(const UnitRecord&), const std::string& label) {
    StratumFit out;
    bool empty = true;
    for (std::size_t i = 0; i < frame.n_total() && empty; ++i) {
        if (in_stratum(frame.unit(i))) empty = false;
    }
    if (empty) {
        out.note = "stratum " + label + " is empty";
        return out;
    }
    try {
        out.coeffs = fit_population(frame, basis, in_stratum, label).coeffs;
    } catch (const Error& e) {
        out.note = e.what();
    }
    return out;
}

bool is_r(const UnitRecord& u) { return u.r; }
bool is_nr(const UnitRecord& u) { return u.in_b && !u.r; }
bool is_b(const UnitRecord& u) { return u.in_b; }
bool is_nb(const UnitRecord& u) { return !u.in_b; }

double coeff_gap_dot(const StratumFit& lhs, const StratumFit& rhs,
                     std::span<const double> totals, const std::string& what) {
    // A zero totals vector (empty paired stratum) nullifies the term even
    // when one of the fits is unavailable.
    bool totals_zero = true;
    for (double t : totals) {
        if (t != 0.0) {
            totals_zero = false;
            break;
        }
    }
    if (totals_zero) return 0.0;
    if (!lhs.coeffs || !rhs.coeffs) {
        const std::string& note = lhs.coeffs ? rhs.note : lhs.note;
        throw DataError("bias decomposition cannot form " + what + ": " + note);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < totals.size(); ++c) {
        s += ((*lhs.coeffs)[c] - (*rhs.coeffs)[c]) * totals[c];
    }
    return s;
}

} // namespace

PopulationRegressions population_regressions(const Frame& frame) {
    PopulationRegressions out;
    out.b_r = try_stratum(frame, Basis::X, is_r, "U_B(R) (X basis)");
    out.b_nr = try_stratum(frame, Basis::X, is_nr, "U_B(NR) (X basis)");
    out.d_r = try_stratum(frame, Basis::Z, is_r, "U_B(R) (Z basis)");
    out.d_b = try_stratum(frame, Basis::Z, is_b, "U_B (Z basis)");
    out.d_nb = try_stratum(frame, Basis::Z, is_nb, "U − U_B (Z basis)");
    return out;
}

BiasTerms bias_decomposition(const Frame& frame, const TotalsBundle& totals) {
    const PopulationRegressions reg = population_regressions(frame);
    std::vector<double> z_gap(totals.t_z.size());
    for (std::size_t m = 0; m < z_gap.size(); ++m) z_gap[m] = totals.t_z[m] - totals.t_z_b[m];

    BiasTerms terms;
    terms.term_nonresponse =
        coeff_gap_dot(reg.b_r, reg.b_nr, totals.t_x_nr, "(b_R − b_NR)ᵗ T_X(NR)");
    terms.term_condition2 =
        coeff_gap_dot(reg.d_r, reg.d_b, z_gap, "(d_R − d_B)ᵗ (T_Z − T_Z(B))");
    terms.term_undercoverage =
        coeff_gap_dot(reg.d_b, reg.d_nb, z_gap, "(d_B − d_NB)ᵗ (T_Z − T_Z(B))");
    return terms;
}

BiasReport approximate_expectation(const Frame& frame, const TotalsBundle& totals) {
    if (!frame.has_full_y()) {
        throw DataError("bias diagnostics need y on every unit (ground-truth frame)");
    }
    BiasReport report;
    report.regressions = population_regressions(frame);
    if (!report.regressions.b_r.coeffs) {
        throw DataError("approximate expectation needs b_R: " + report.regressions.b_r.note);
    }
    if (!report.regressions.d_r.coeffs) {
        throw DataError("approximate expectation needs d_R: " + report.regressions.d_r.note);
    }
    report.ae = dot(*report.regressions.b_r.coeffs, totals.t_x_b);
    for (std::size_t m = 0; m < totals.t_z.size(); ++m) {
        report.ae += (*report.regressions.d_r.coeffs)[m] * (totals.t_z[m] - totals.t_z_b[m]);
    }

    report.t_y = *true_y_total(frame);
    NeumaierSum y_b;
    for (std::size_t k = 0; k < frame.n_b(); ++k) y_b.add(*frame.b_unit(k).y);
    report.t_y_b = y_b.value();

    if (report.t_y == 0.0) {
        throw NumericalError("approximate relative bias undefined: T_Y = 0");
    }
    report.approx_rb = (report.ae - report.t_y) / report.t_y;
    report.terms = bias_decomposition(frame, totals);
    return report;
}

} // namespace dcal
