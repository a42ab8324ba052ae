#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dcal/error.hpp"
#include "dcal/rng.hpp"

namespace dcal {

struct SrsworProbs {
    double pi;       // first-order inclusion probability n/N_B
    double pi_joint; // second-order n(n-1)/(N_B(N_B-1))
};

/// Inclusion probabilities for simple random sampling without replacement
/// of n out of n_b units. Requires 0 < n < n_b.
SrsworProbs srswor_probs(std::size_t n_b, std::size_t n);

/// Fixed-size sampling design on the covered sub-population. SRSWOR is the
/// design the harness exercises; ExplicitProbabilities keeps the estimator
/// and variance code design-generic (census checks, small enumeration
/// fixtures).
class Design {
public:
    enum class Kind { Srswor, ExplicitProbabilities };

    static Design srswor(std::size_t n_b, std::size_t n);

    /// pi[k] in (0,1] per covered unit; pi_joint(j,h) supplied as a dense
    /// symmetric lookup with entries in (0, min(pi_j, pi_h)]. Only suitable
    /// for small n_b.
    static Design explicit_probs(std::size_t n, std::vector<double> pi,
                                 std::vector<double> pi_joint_dense);

    /// Census of n_b units: every pi and joint probability equals 1.
    static Design census(std::size_t n_b);

    Kind kind() const noexcept { return kind_; }
    std::size_t n_b() const noexcept { return n_b_; }
    std::size_t n() const noexcept { return n_; }

    double pi(std::size_t j) const;
    double pi_joint(std::size_t j, std::size_t h) const;

    std::string summary() const;

private:
    Design() = default;

    Kind kind_ = Kind::Srswor;
    std::size_t n_b_ = 0;
    std::size_t n_ = 0;
    double pi_srswor_ = 0.0;
    double pi_joint_srswor_ = 0.0;
    std::vector<double> pi_;       // ExplicitProbabilities only
    std::vector<double> pi_joint_; // dense n_b x n_b, row-major
};

/// A realized sample: sorted distinct indices into the frame's covered-unit
/// ordering.
struct SampleDraw {
    std::vector<std::size_t> indices;
};

/// Draws a uniform SRSWOR sample of n out of n_b by sequential
/// selection-rejection; deterministic given the rng state.
SampleDraw draw_srswor(std::size_t n_b, std::size_t n, Rng& rng);

} // namespace dcal
