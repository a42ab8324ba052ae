#include "dcal/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "dcal/diagnostics.hpp"
#include "dcal/variance.hpp"

namespace dcal {

namespace {

std::string formatted(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

void fnv_absorb(std::uint64_t& h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
    }
}

void fnv_absorb_double(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    fnv_absorb(h, &bits, sizeof(bits));
}

} // namespace

double rrmse_benchmark(std::size_t n_total, std::size_t n, double cv_y) {
    if (n == 0 || n > n_total) {
        throw NumericalError("rrmse_benchmark requires 0 < n <= N (got n=" + std::to_string(n) +
                             ", N=" + std::to_string(n_total) + ")");
    }
    const double nn = static_cast<double>(n);
    const double nt = static_cast<double>(n_total);
    return std::sqrt((nt - nn) / (nt * nn)) * cv_y;
}

std::string frame_fingerprint(const Frame& frame) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < frame.n_total(); ++i) {
        const UnitRecord& u = frame.unit(i);
        const unsigned char flags =
            static_cast<unsigned char>((u.in_b ? 1 : 0) | (u.r ? 2 : 0) | (u.y ? 4 : 0));
        fnv_absorb(h, &flags, 1);
        if (u.y) fnv_absorb_double(h, *u.y);
        for (double z : u.z) fnv_absorb_double(h, z);
        if (u.x) {
            for (double x : *u.x) fnv_absorb_double(h, x);
        }
    }
    return formatted("%016llx", static_cast<unsigned long long>(h));
}

CellRow run_cell(const GeneratedFrame& gf, std::size_t n, std::size_t replicates,
                 std::uint64_t row_seed) {
    const Frame& frame = gf.frame;
    if (!(n > 0 && n <= frame.n_b())) {
        throw NumericalError("run_cell requires 0 < n <= N_B (got n=" + std::to_string(n) +
                             ", N_B=" + std::to_string(frame.n_b()) + ")");
    }
    if (replicates == 0) throw NumericalError("run_cell requires at least one replicate");
    if (gf.t_y == 0.0) throw NumericalError("run_cell: T_Y = 0, relative metrics undefined");
    const bool census = n == frame.n_b();

    CellRow row;
    row.rho_xy = gf.config.rho_xy;
    row.rho_zy = gf.config.rho_zy;
    row.rho_xz = gf.rho_xz_used;
    row.n_resp = gf.config.n_resp;
    row.n = n;
    row.replicates = replicates;
    row.seed = row_seed;
    row.fingerprint = frame_fingerprint(frame);

    const Design design = census ? Design::census(frame.n_b()) : Design::srswor(frame.n_b(), n);
    const double t_y = gf.t_y;
    SampleDraw census_draw;
    if (census) {
        census_draw.indices.resize(frame.n_b());
        for (std::size_t k = 0; k < frame.n_b(); ++k) census_draw.indices[k] = k;
    }

    const InfluenceSet u = influence_population(frame, gf.totals);
    row.arrmse_pct = 100.0 * std::sqrt(approx_variance(u, design)) / t_y;
    row.benchmark_pct =
        100.0 * rrmse_benchmark(gf.config.n_total, n, gf.config.moments.target_cv_y());
    row.approx_rb_pct = 100.0 * approximate_expectation(frame, gf.totals).approx_rb;

    NeumaierSum sum_total, sum_sq_err, sum_rrmse_hat;
    std::size_t covered = 0;
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        Rng rng(mix_seed(row_seed, rep));
        const SampleDraw draw = census ? census_draw : draw_srswor(frame.n_b(), n, rng);
        double total, variance;
        try {
            const DcalEstimate est =
                double_calibration(frame, draw, design, gf.totals.t_x_b, gf.totals.t_z);
            const InfluenceSet u_hat = influence_empirical(frame, draw, design, gf.totals);
            total = est.total;
            variance = syg_variance(u_hat, design, draw);
        } catch (const SingularSystem&) { // rank-deficient respondent fit
            ++row.n_failed;
            continue;
        } catch (const DataError&) { // e.g. a draw with no respondents
            ++row.n_failed;
            continue;
        }
        if (total == 0.0) { // relative interval metrics undefined; treat as failed
            ++row.n_failed;
            continue;
        }
        const double se = std::sqrt(variance);
        const double err = total - t_y;
        sum_total.add(total);
        sum_sq_err.add(err * err);
        sum_rrmse_hat.add(se / total);
        if (std::abs(err) <= 2.0 * se) ++covered;
    }

    const std::size_t good = replicates - row.n_failed;
    row.valid = row.n_failed * 100 <= replicates;
    if (good == 0) {
        row.valid = false;
        row.rb_pct = row.rrmse_pct = row.errmsee_pct = row.cov95_pct =
            std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    const double g = static_cast<double>(good);
    row.rb_pct = 100.0 * (sum_total.value() / g - t_y) / t_y;
    row.rrmse_pct = 100.0 * std::sqrt(sum_sq_err.value() / g) / t_y;
    row.errmsee_pct = 100.0 * sum_rrmse_hat.value() / g;
    row.cov95_pct = 100.0 * static_cast<double>(covered) / g;
    return row;
}

GridResult run_grid(const GridSpec& spec) {
    GridResult result;
    result.spec = spec;

    struct CellTask {
        std::size_t cell_index;
        double rho_xy, rho_zy;
        std::size_t n_resp;
        std::uint64_t cell_seed;
    };
    std::vector<CellTask> cells;
    std::size_t cell_index = 0;
    for (std::size_t ix = 0; ix < spec.rho_xy_values.size(); ++ix) {
        for (std::size_t iz = 0; iz < spec.rho_zy_values.size(); ++iz) {
            for (std::size_t ir = 0; ir < spec.n_resp_values.size(); ++ir) {
                const std::uint64_t cell_seed =
                    mix_seed(mix_seed(mix_seed(spec.master_seed, ix), iz), ir);
                cells.push_back({cell_index++, spec.rho_xy_values[ix], spec.rho_zy_values[iz],
                                 spec.n_resp_values[ir], cell_seed});
            }
        }
    }

    const std::size_t n_sizes = spec.sample_sizes.size();
    result.rows.resize(cells.size() * n_sizes);

    unsigned threads = spec.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= cells.size()) return;
            try {
                const CellTask& task = cells[c];
                ScenarioConfig config;
                config.n_total = spec.n_total;
                config.n_b = spec.n_b;
                config.n_resp = task.n_resp;
                config.rho_xy = task.rho_xy;
                config.rho_zy = task.rho_zy;
                config.rho_xz_policy = spec.rho_xz_policy;
                config.rho_xz_value = spec.rho_xz_value;
                config.epsilon = spec.epsilon;
                config.grid_step = spec.grid_step;
                config.moments = spec.moments;
                Rng frame_rng(mix_seed(task.cell_seed, 0));
                const GeneratedFrame frame = generate_population(config, frame_rng);
                for (std::size_t s = 0; s < n_sizes; ++s) {
                    const std::uint64_t row_seed =
                        mix_seed(task.cell_seed, spec.sample_sizes[s]);
                    result.rows[task.cell_index * n_sizes + s] =
                        run_cell(frame, spec.sample_sizes[s], spec.replicates, row_seed);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return result;
}

void write_grid_csv(const GridResult& result, std::ostream& out) {
    out << "rho_xy,rho_zy,rho_xz,n_resp,n,replicates,n_failed,valid,rb_pct,arrmse_pct,"
           "rrmse_pct,benchmark_pct,errmsee_pct,cov95_pct,approx_rb_pct,seed,frame\n";
    for (const CellRow& r : result.rows) {
        out << formatted("%.6g,%.6g,%.6g,%zu,%zu,%zu,%zu,%d,", r.rho_xy, r.rho_zy, r.rho_xz,
                         r.n_resp, r.n, r.replicates, r.n_failed, r.valid ? 1 : 0);
        out << formatted("%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,", r.rb_pct, r.arrmse_pct,
                         r.rrmse_pct, r.benchmark_pct, r.errmsee_pct, r.cov95_pct,
                         r.approx_rb_pct);
        out << formatted("%llu,%s\n", static_cast<unsigned long long>(r.seed),
                         r.fingerprint.c_str());
    }
}

void write_grid_table(const GridResult& result, std::ostream& out) {
    const std::size_t n_sizes = result.spec.sample_sizes.size();
    for (std::size_t start = 0; start < result.rows.size(); start += n_sizes) {
        const CellRow& head = result.rows[start];
        out << formatted(
            "rho_XY=%.2f  rho_ZY=%.2f  rho_XZ=%.3f  N=%zu  N_B=%zu  N_B(R)=%zu  frame=%s\n",
            head.rho_xy, head.rho_zy, head.rho_xz, result.spec.n_total, result.spec.n_b,
            head.n_resp, head.fingerprint.c_str());
        out << formatted("Approximate relative bias: %.1f\n", head.approx_rb_pct);
        out << "     n      RB  ARRMSE    RRMSE (bench)  ERRMSEE   COV95\n";
        for (std::size_t s = 0; s < n_sizes && start + s < result.rows.size(); ++s) {
            const CellRow& r = result.rows[start + s];
            out << formatted("%6zu  %6.1f  %6.1f   %6.1f  (%4.1f)   %6.1f  %6.1f", r.n,
                             r.rb_pct, r.arrmse_pct, r.rrmse_pct, r.benchmark_pct,
                             r.errmsee_pct, r.cov95_pct);
            if (r.n_failed > 0) {
                out << formatted("  [%zu failed%s]", r.n_failed, r.valid ? "" : ", INVALID");
            }
            out << '\n';
        }
        out << '\n';
    }
}

} // namespace dcal
