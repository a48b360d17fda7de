#ifndef FRAMEOPT_TEST_UTIL_HPP
#define FRAMEOPT_TEST_UTIL_HPP

#include <Eigen/Dense>
#include <vector>

// Shared helpers for the test suite: chi-square statistics frozen against
// standard tables and a few tiny structural models used across files.

namespace testutil {

// 99th percentile of the chi-square distribution, df = 1..8.
inline double chi2_crit99(int df) {
    static const double crit[] = {6.63489660102121,  9.21034037197618,
                                  11.3448667301444,  13.2767041359876,
                                  15.0862724693889,  16.8118938297709,
                                  18.4753069065824,  20.0902350296632};
    return crit[df - 1];
}

// Pearson goodness-of-fit statistic for observed counts against expected
// probabilities.
inline double chi2_gof(const std::vector<long>& counts, const Eigen::VectorXd& probs,
                       long total) {
    double stat = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
        const double expected = total * probs(i);
        const double d = counts[i] - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Two-sample homogeneity statistic for equal-sized count vectors.
inline double chi2_two_sample(const std::vector<long>& a, const std::vector<long>& b) {
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double n = static_cast<double>(a[i] + b[i]);
        if (n == 0.0) continue;
        const double d = static_cast<double>(a[i] - b[i]);
        stat += d * d / n;
    }
    return stat;
}

} // namespace testutil

#endif
