#pragma once

// Shared fixtures for the unit tests: tiny hand-built frames, random frame
// generators for property tests, and exhaustive sample enumeration for the
// small-population unbiasedness checks.

#include <dcal/design.hpp>
#include <dcal/frame.hpp>
#include <dcal/linalg.hpp>
#include <dcal/rng.hpp>

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace testsupport {

inline dcal::UnitRecord unit(std::string id, bool in_b, bool r,
                             std::vector<double> x, std::vector<double> z,
                             std::optional<double> y) {
  dcal::UnitRecord u;
  u.id = std::move(id);
  u.in_b = in_b;
  u.r = r;
  if (!x.empty()) u.x = std::move(x);
  u.z = std::move(z);
  u.y = y;
  return u;
}

// A frame whose covered stratum follows y = 2 + 3x exactly; z = (1, x).
// Three covered respondents, one covered nonrespondent, one unit outside
// the covered stratum.  All values dyadic so column sums are exact.
inline dcal::Frame tiny_linear_frame() {
  std::vector<dcal::UnitRecord> units;
  units.push_back(unit("1", true, true, {1.0, 1.0}, {1.0, 1.0}, 5.0));
  units.push_back(unit("2", true, true, {1.0, 2.0}, {1.0, 2.0}, 8.0));
  units.push_back(unit("3", true, true, {1.0, 4.0}, {1.0, 4.0}, 14.0));
  units.push_back(unit("4", true, false, {1.0, 3.0}, {1.0, 3.0}, 11.0));
  units.push_back(unit("5", false, false, {}, {1.0, 6.0}, 20.0));
  return dcal::Frame(std::move(units), 2, 2);
}

// Random frame with intercepted bases, full y, dyadic-friendly doubles.
// y = 1 + 2 x2 + 0.5 z2 + noise.  Units are laid out respondents-first.
inline dcal::Frame random_frame(dcal::Rng& rng, std::size_t n_total,
                                std::size_t n_b, std::size_t n_resp,
                                double noise_sd = 1.0) {
  std::vector<dcal::UnitRecord> units;
  units.reserve(n_total);
  for (std::size_t i = 0; i < n_total; ++i) {
    const bool in_b = i < n_b;
    const bool resp = i < n_resp;
    const double x2 = 1.0 + rng.normal();
    const double z2 = 0.5 * x2 + rng.normal();
    const double y = 1.0 + 2.0 * x2 + 0.5 * z2 + noise_sd * rng.normal();
    std::vector<double> xv;
    if (in_b) xv = {1.0, x2};
    units.push_back(unit(std::to_string(i + 1), in_b, resp, std::move(xv),
                         {1.0, z2}, y));
  }
  return dcal::Frame(std::move(units), 2, 2);
}

// All size-n subsets of {0,...,n_b-1} in lexicographic order.
inline std::vector<std::vector<std::size_t>> all_samples(std::size_t n_b,
                                                         std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(n);
  for (std::size_t i = 0; i < n; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t k = n;
    while (k > 0 && cur[k - 1] == n_b - n + (k - 1)) --k;
    if (k == 0) break;
    ++cur[k - 1];
    for (std::size_t j = k; j < n; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

// Frame with dyadic values only (multiples of 1/8), so that every column
// sum, gram entry and unit-weighted accumulation is exact in double
// precision; lets tests assert bitwise equalities across code paths.
inline dcal::Frame dyadic_frame(std::size_t n_total, std::size_t n_b,
                                std::size_t n_resp, dcal::Rng& rng) {
  std::vector<dcal::UnitRecord> units;
  for (std::size_t i = 0; i < n_total; ++i) {
    const bool in_b = i < n_b;
    const bool r = i < n_resp;
    auto dy = [&rng](double lo, double hi) {
      const double raw = lo + (hi - lo) * rng.uniform01();
      return std::round(raw * 8.0) / 8.0;
    };
    const double x2 = dy(-2.0, 2.0);
    const double z2 = dy(-2.0, 2.0);
    const double y = dy(-4.0, 4.0);
    std::vector<double> x;
    if (in_b) x = {1.0, x2};
    units.push_back(unit(std::to_string(i + 1), in_b, r, std::move(x),
                         {1.0, z2}, y));
  }
  return dcal::Frame(std::move(units), 2, 2);
}

// The plug-in functional T(w) whose gradient at w = 1 defines the influence
// values: per-unit weights w over U_B scale the respondent grams/moments and
// the covered z-total.
inline double plugin_functional(const dcal::Frame& frame,
                                const dcal::TotalsBundle& totals,
                                const std::vector<double>& w) {
  const std::size_t kx = frame.x_dim();
  const std::size_t kz = frame.z_dim();
  dcal::SymMatrix a(kx), c(kz);
  std::vector<double> ax(kx, 0.0), cz(kz, 0.0), z_w(kz, 0.0);
  for (std::size_t k = 0; k < frame.n_b(); ++k) {
    const dcal::UnitRecord& u = frame.b_unit(k);
    for (std::size_t m = 0; m < kz; ++m) z_w[m] += w[k] * u.z[m];
    if (!u.r) continue;
    a.add_outer(*u.x, w[k]);
    c.add_outer(u.z, w[k]);
    for (std::size_t m = 0; m < kx; ++m) ax[m] += w[k] * *u.y * (*u.x)[m];
    for (std::size_t m = 0; m < kz; ++m) cz[m] += w[k] * *u.y * u.z[m];
  }
  const std::vector<double> b = dcal::solve_spd(a, ax);
  const std::vector<double> d = dcal::solve_spd(c, cz);
  double t = dcal::dot(b, totals.t_x_b);
  for (std::size_t m = 0; m < kz; ++m) t += d[m] * (totals.t_z[m] - z_w[m]);
  return t;
}

}  // namespace testsupport
