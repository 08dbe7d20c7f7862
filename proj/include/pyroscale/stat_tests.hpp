#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace pyroscale {

// Kolmogorov-Smirnov distance between a sorted sample and a continuous CDF:
// sup over sample points of max(|i/n - F|, |(i-1)/n - F|).
double ks_statistic(const std::vector<double>& sorted_sample,
                    const std::function<double(double)>& cdf);

// Two-sample KS distance; handles ties/atoms by sweeping distinct merged
// values of both sorted samples.
double ks_two_sample(const std::vector<double>& sorted_a,
                     const std::vector<double>& sorted_b);

// Asymptotic p-value P[D_n > d] via the Kolmogorov series
// 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 n d^2).
double kolmogorov_pvalue(double d, std::size_t n);

struct chi_square_result {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Goodness-of-fit chi-square of observed counts against cell probabilities.
// Probabilities may sum to less than one; the remainder becomes a tail cell
// holding the unassigned count.  Cells with expected count below
// min_expected are pooled into their right neighbor (cascading into the
// tail), the standard validity fix for sparse cells.
chi_square_result chi_square_gof(const std::vector<std::int64_t>& counts,
                                 std::int64_t total,
                                 const std::vector<double>& probs,
                                 double min_expected = 5.0);

// Standard error of a binomial proportion estimate.
double binomial_stderr(double p_hat, std::size_t n);

} // namespace pyroscale
