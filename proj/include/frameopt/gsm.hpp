#ifndef FRAMEOPT_GSM_HPP
#define FRAMEOPT_GSM_HPP

#include <Eigen/Dense>
#include <cmath>

#include "frameopt/error.hpp"
#include "frameopt/rng.hpp"

// Differentiable categorical sampling: Gumbel-max draws, the tempered
// softmax relaxation, its straight-through hard counterpart, and the
// Jacobian of the relaxation with respect to the logits.

namespace frameopt {

inline double logit(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("logit: probability must lie strictly inside (0,1)");
    return std::log(p / (1.0 - p));
}

// Max-subtracted softmax; finite for any input magnitudes.
inline Eigen::VectorXd softmax(const Eigen::VectorXd& z) {
    if (z.size() == 0) throw DomainError("softmax: empty vector");
    Eigen::VectorXd s = (z.array() - z.maxCoeff()).exp();
    s /= s.sum();
    return s;
}

// G = -ln(-ln(r)) for uniform r; r is expected to already be clamped away
// from {0, 1} (Rng::uniform01 guarantees this).
inline double gumbel_from_uniform(double r) {
    if (!(r > 0.0 && r < 1.0))
        throw DomainError("gumbel_from_uniform: r must lie strictly inside (0,1)");
    return -std::log(-std::log(r));
}

inline Eigen::VectorXd sample_gumbel(int n, Rng& rng) {
    if (n <= 0) throw DomainError("sample_gumbel: n must be positive");
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = gumbel_from_uniform(rng.uniform01());
    return g;
}

// Ties resolve to the lowest index everywhere a hard choice is made.
inline int argmax_lowest(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return best;
}

// One-hot categorical draw. `index` is the 0-based argmax position.
struct HardSample {
    int index = 0;
    Eigen::VectorXd onehot;
};

inline HardSample make_onehot(int index, int n) {
    HardSample h;
    h.index = index;
    h.onehot = Eigen::VectorXd::Zero(n);
    h.onehot(index) = 1.0;
    return h;
}

// Gumbel-max draw: argmax_i(theta_i + G_i); distributed as softmax(theta).
inline HardSample gm_sample(const Eigen::VectorXd& theta, Rng& rng) {
    if (theta.size() == 0) throw DomainError("gm_sample: empty logits");
    const Eigen::VectorXd g = sample_gumbel(static_cast<int>(theta.size()), rng);
    return make_onehot(argmax_lowest(theta + g), static_cast<int>(theta.size()));
}

// Inverse-CDF draw over softmax(theta): pick the largest index i whose
// cumulative probability (exclusive of p_i) does not exceed r.
inline HardSample cdf_sample(const Eigen::VectorXd& theta, Rng& rng) {
    if (theta.size() == 0) throw DomainError("cdf_sample: empty logits");
    const Eigen::VectorXd p = softmax(theta);
    const double r = rng.uniform01();
    double cumulative = 0.0;
    int pick = 0;
    for (int i = 0; i < p.size(); ++i) {
        if (cumulative <= r) pick = i;
        cumulative += p(i);
    }
    return make_onehot(pick, static_cast<int>(theta.size()));
}

// Tempered softmax relaxation of the Gumbel-max draw with the given noises.
inline Eigen::VectorXd gsm_soft_sample(const Eigen::VectorXd& theta,
                                       const Eigen::VectorXd& noises, double tau) {
    if (tau <= 0.0) throw DomainError("gsm_soft_sample: temperature must be positive");
    if (theta.size() != noises.size())
        throw DomainError("gsm_soft_sample: logits/noises size mismatch");
    return softmax((theta + noises) / tau);
}

inline HardSample straight_through(const Eigen::VectorXd& soft) {
    return make_onehot(argmax_lowest(soft), static_cast<int>(soft.size()));
}

// d soft_i / d theta_j. With scale_by_temperature the exact derivative of
// softmax((theta+G)/tau) is returned:
//   (1/tau) * (diag(s) - s s^T)
// Disabling the flag drops the 1/tau factor (the unscaled product form).
inline Eigen::MatrixXd soft_sample_jacobian(const Eigen::VectorXd& soft, double tau,
                                            bool scale_by_temperature = true) {
    if (tau <= 0.0) throw DomainError("soft_sample_jacobian: temperature must be positive");
    const double factor = scale_by_temperature ? 1.0 / tau : 1.0;
    Eigen::MatrixXd j = -soft * soft.transpose();
    j.diagonal() += soft;
    j *= factor;
    return j;
}

// Geometric temperature schedule with a floor.
struct AnnealSchedule {
    double initial_temp = 100.0;
    double decay = 0.9;
    double min_temp = 0.01;

    void check() const {
        if (initial_temp <= 0.0 || min_temp <= 0.0 || decay <= 0.0 || decay > 1.0)
            throw ConfigError("AnnealSchedule: require initial_temp, min_temp > 0 and decay in (0,1]");
    }

    double temperature(int iteration) const {
        check();
        return std::max(min_temp, initial_temp * std::pow(decay, iteration));
    }
};

} // namespace frameopt

#endif
