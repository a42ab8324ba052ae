#include "dcal/simgen.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace dcal {

namespace {

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void check_correlation(double rho, const char* name) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw NumericalError(std::string(name) + " = " + short_num(rho) +
                             " must lie in (-1, 1)");
    }
}

} // namespace

double min_feasible_rho_xz(double rho_xy, double rho_zy) {
    check_correlation(rho_xy, "rho_xy");
    check_correlation(rho_zy, "rho_zy");
    return rho_xy * rho_zy - std::sqrt((1.0 - rho_xy * rho_xy) * (1.0 - rho_zy * rho_zy));
}

double correlation_determinant(double rho_xy, double rho_zy, double rho_xz) {
    return 1.0 - rho_xy * rho_xy - rho_zy * rho_zy - rho_xz * rho_xz +
           2.0 * rho_xy * rho_zy * rho_xz;
}

double resolve_rho_xz(const ScenarioConfig& config) {
    const double lo = min_feasible_rho_xz(config.rho_xy, config.rho_zy);
    const double hi = config.rho_xy * config.rho_zy +
                      std::sqrt((1.0 - config.rho_xy * config.rho_xy) *
                                (1.0 - config.rho_zy * config.rho_zy));
    auto feasible = [&](double v) {
        return correlation_determinant(config.rho_xy, config.rho_zy, v) > 0.0;
    };
    switch (config.rho_xz_policy) {
        case RhoXzPolicy::Explicit:
            if (!feasible(config.rho_xz_value)) {
                throw NumericalError(
                    "rho_xz = " + short_num(config.rho_xz_value) +
                    " leaves the covariance matrix non-positive-definite (determinant " +
                    short_num(correlation_determinant(config.rho_xy, config.rho_zy,
                                                      config.rho_xz_value)) +
                    "); minimal feasible rho_xz is " + short_num(lo));
            }
            return config.rho_xz_value;
        case RhoXzPolicy::MinimalFeasible: {
            const double v = lo + config.epsilon;
            if (!feasible(v)) {
                throw NumericalError("epsilon " + short_num(config.epsilon) +
                                     " pushes rho_xz past the feasible interval (" +
                                     short_num(lo) + ", " + short_num(hi) + ")");
            }
            return v;
        }
        case RhoXzPolicy::GridFeasible: {
            if (!(config.grid_step > 0.0)) {
                throw NumericalError("grid_step must be positive");
            }
            for (int k = 0; k * config.grid_step < 1.0; ++k) {
                const double v = k * config.grid_step;
                if (feasible(v)) return v;
            }
            // Entirely negative feasible interval; fall back to the bound.
            ScenarioConfig fallback = config;
            fallback.rho_xz_policy = RhoXzPolicy::MinimalFeasible;
            return resolve_rho_xz(fallback);
        }
    }
    throw NumericalError("unknown rho_xz policy");
}

SymMatrix build_covariance(const ScenarioConfig& config) {
    const double rho_xz = resolve_rho_xz(config);
    const MomentSpec& m = config.moments;
    if (!(m.var_x > 0.0 && m.var_z > 0.0 && m.var_y > 0.0)) {
        throw NumericalError("variances must be positive");
    }
    const double sd_x = std::sqrt(m.var_x);
    const double sd_z = std::sqrt(m.var_z);
    const double sd_y = std::sqrt(m.var_y);
    SymMatrix cov(3);
    cov.at(0, 0) = m.var_x;
    cov.at(1, 1) = m.var_z;
    cov.at(2, 2) = m.var_y;
    cov.at(1, 0) = rho_xz * sd_x * sd_z;
    cov.at(2, 0) = config.rho_xy * sd_x * sd_y;
    cov.at(2, 1) = config.rho_zy * sd_z * sd_y;
    try {
        cholesky(cov);
    } catch (const SingularSystem&) {
        throw NumericalError("covariance matrix is not positive definite; minimal feasible "
                             "rho_xz is " +
                             short_num(min_feasible_rho_xz(config.rho_xy, config.rho_zy)));
    }
    return cov;
}

GeneratedFrame generate_population(const ScenarioConfig& config, Rng& rng) {
    if (config.n_b == 0 || config.n_b > config.n_total || config.n_resp > config.n_b) {
        throw NumericalError("scenario sizes must satisfy n_resp <= n_b <= n_total with n_b > 0");
    }
    const SymMatrix cov = build_covariance(config);
    const CholeskyFactor l = cholesky(cov);
    const MomentSpec& m = config.moments;

    const std::size_t n = config.n_total;
    std::vector<double> xs(n), zs(n), ys(n);
    std::vector<UnitRecord> units(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double e0 = rng.normal();
        const double e1 = rng.normal();
        const double e2 = rng.normal();
        xs[i] = m.mean_x + l.at(0, 0) * e0;
        zs[i] = m.mean_z + l.at(1, 0) * e0 + l.at(1, 1) * e1;
        ys[i] = m.mean_y + l.at(2, 0) * e0 + l.at(2, 1) * e1 + l.at(2, 2) * e2;
        UnitRecord& u = units[i];
        u.id = std::to_string(i + 1);
        u.in_b = i < config.n_b;
        u.r = i < config.n_resp;
        u.z = {zs[i]};
        u.y = ys[i];
        if (u.in_b) u.x = std::vector<double>{xs[i]};
    }

    GeneratedFrame out{Frame(std::move(units), 1, 1, /*with_intercept=*/true),
                       TotalsBundle{},
                       0.0,
                       0.0,
                       0.0,
                       resolve_rho_xz(config),
                       config,
                       AchievedMoments{}};
    out.totals = compute_totals(out.frame);
    out.t_y = *true_y_total(out.frame);
    NeumaierSum y_b;
    for (std::size_t k = 0; k < out.frame.n_b(); ++k) y_b.add(*out.frame.b_unit(k).y);
    out.t_y_b = y_b.value();

    // Achieved moments over all N generated triples (x included even where
    // the frame drops it).
    auto mean_of = [n](const std::vector<double>& v) {
        NeumaierSum s;
        for (double e : v) s.add(e);
        return s.value() / static_cast<double>(n);
    };
    const double mx = mean_of(xs), mz = mean_of(zs), my = mean_of(ys);
    auto cross = [n](const std::vector<double>& a, double ma, const std::vector<double>& b,
                     double mb) {
        NeumaierSum s;
        for (std::size_t i = 0; i < n; ++i) s.add((a[i] - ma) * (b[i] - mb));
        return s.value();
    };
    const double sxx = cross(xs, mx, xs, mx);
    const double szz = cross(zs, mz, zs, mz);
    const double syy = cross(ys, my, ys, my);
    out.achieved.mean_x = mx;
    out.achieved.mean_z = mz;
    out.achieved.mean_y = my;
    out.achieved.corr_xy = cross(xs, mx, ys, my) / std::sqrt(sxx * syy);
    out.achieved.corr_zy = cross(zs, mz, ys, my) / std::sqrt(szz * syy);
    out.achieved.corr_xz = cross(xs, mx, zs, mz) / std::sqrt(sxx * szz);
    out.cv_y = std::sqrt(syy / static_cast<double>(n - 1)) / my;
    return out;
}

} // namespace dcal
