#include "dcal/design.hpp"

#include <algorithm>
#include <cmath>

namespace dcal {

SrsworProbs srswor_probs(std::size_t n_b, std::size_t n) {
    if (n == 0 || n >= n_b) {
        throw NumericalError("SRSWOR requires 0 < n < N_B (got n=" + std::to_string(n) +
                             ", N_B=" + std::to_string(n_b) + ")");
    }
    const double nb = static_cast<double>(n_b);
    const double nn = static_cast<double>(n);
    return SrsworProbs{nn / nb, nn * (nn - 1.0) / (nb * (nb - 1.0))};
}

Design Design::srswor(std::size_t n_b, std::size_t n) {
    const SrsworProbs p = srswor_probs(n_b, n);
    Design d;
    d.kind_ = Kind::Srswor;
    d.n_b_ = n_b;
    d.n_ = n;
    d.pi_srswor_ = p.pi;
    d.pi_joint_srswor_ = p.pi_joint;
    return d;
}

Design Design::explicit_probs(std::size_t n, std::vector<double> pi,
                              std::vector<double> pi_joint_dense) {
    const std::size_t n_b = pi.size();
    if (n_b == 0) throw NumericalError("explicit design needs at least one unit");
    if (pi_joint_dense.size() != n_b * n_b) {
        throw NumericalError("joint probability table must be N_B x N_B");
    }
    for (std::size_t j = 0; j < n_b; ++j) {
        if (!(pi[j] > 0.0 && pi[j] <= 1.0)) {
            throw NumericalError("pi[" + std::to_string(j) + "] = " + std::to_string(pi[j]) +
                                 " outside (0, 1]");
        }
        for (std::size_t h = 0; h < j; ++h) {
            const double pjh = pi_joint_dense[j * n_b + h];
            if (pi_joint_dense[h * n_b + j] != pjh) {
                throw NumericalError("joint probabilities must be symmetric (pair " +
                                     std::to_string(j) + "," + std::to_string(h) + ")");
            }
            if (!(pjh > 0.0 && pjh <= std::min(pi[j], pi[h]))) {
                throw NumericalError("pi_joint[" + std::to_string(j) + "," + std::to_string(h) +
                                     "] must lie in (0, min(pi_j, pi_h)]");
            }
        }
    }
    Design d;
    d.kind_ = Kind::ExplicitProbabilities;
    d.n_b_ = n_b;
    d.n_ = n;
    d.pi_ = std::move(pi);
    d.pi_joint_ = std::move(pi_joint_dense);
    return d;
}

Design Design::census(std::size_t n_b) {
    if (n_b == 0) throw NumericalError("census design needs at least one unit");
    Design d;
    d.kind_ = Kind::ExplicitProbabilities;
    d.n_b_ = n_b;
    d.n_ = n_b;
    d.pi_.assign(n_b, 1.0);
    d.pi_joint_.assign(n_b * n_b, 1.0);
    return d;
}

double Design::pi(std::size_t j) const {
    if (kind_ == Kind::Srswor) return pi_srswor_;
    return pi_[j];
}

double Design::pi_joint(std::size_t j, std::size_t h) const {
    if (kind_ == Kind::Srswor) return pi_joint_srswor_;
    return pi_joint_[j * n_b_ + h];
}

std::string Design::summary() const {
    if (kind_ == Kind::Srswor) {
        return "SRSWOR n=" + std::to_string(n_) + " of N_B=" + std::to_string(n_b_);
    }
    const bool census = n_ == n_b_ &&
                        std::all_of(pi_.begin(), pi_.end(), [](double p) { return p == 1.0; });
    if (census) return "census of N_B=" + std::to_string(n_b_);
    return "explicit probabilities, n=" + std::to_string(n_) +
           ", N_B=" + std::to_string(n_b_);
}

SampleDraw draw_srswor(std::size_t n_b, std::size_t n, Rng& rng) {
    srswor_probs(n_b, n); // validates 0 < n < n_b
    SampleDraw draw;
    draw.indices.reserve(n);
    std::size_t chosen = 0;
    for (std::size_t i = 0; i < n_b && chosen < n; ++i) {
        const double remaining_units = static_cast<double>(n_b - i);
        const double remaining_picks = static_cast<double>(n - chosen);
        if (rng.uniform01() * remaining_units < remaining_picks) {
            draw.indices.push_back(i);
            ++chosen;
        }
    }
    return draw;
}

} // namespace dcal
