// Utility layer: counter RNG, adaptive quadrature, statistical tests.

#include <doctest.h>

#include "pyroscale/quadrature.hpp"
#include "pyroscale/rng.hpp"
#include "pyroscale/stat_tests.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

using namespace pyroscale;

TEST_CASE("counter rng is a pure function of (key, counter)") {
    counter_rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    // Restarting from the same key replays the same stream.
    counter_rng c(42);
    counter_rng d(43);
    bool all_equal = true;
    for (int i = 0; i < 100; ++i)
        all_equal = all_equal && (c.next_u64() == d.next_u64());
    CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 stays inside the open unit interval") {
    counter_rng rng(7);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    // Mean of n uniforms: 1/2 +- 3/sqrt(12 n).
    CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
}

TEST_CASE("exponential and poisson moments") {
    counter_rng rng(11);
    const int n = 200000;
    double se = 0.0;
    for (int i = 0; i < n; ++i) se += rng.exponential(2.0);
    CHECK(std::abs(se / n - 0.5) < 3.0 * 0.5 / std::sqrt(double(n)));

    // Poisson mean straddles the recursion threshold at 30.
    for (const double mean : {3.0, 47.5}) {
        double sp = 0.0;
        for (int i = 0; i < n / 4; ++i)
            sp += static_cast<double>(rng.poisson(mean));
        const double se3 = 3.0 * std::sqrt(mean / (n / 4));
        CHECK(std::abs(sp / (n / 4) - mean) < se3);
    }
    CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("derive_key separates coordinates") {
    CHECK(derive_key(1, 2, 3, 4) != derive_key(1, 2, 4, 3));
    CHECK(derive_key(1, stream_tag::seed, 5) !=
          derive_key(1, stream_tag::match, 5));
    CHECK(derive_key(1, stream_tag::seed, 5) ==
          derive_key(1, stream_tag::seed, 5));

    // No collisions across a realistic block of site indices.
    std::vector<std::uint64_t> keys;
    for (std::uint64_t s = 0; s < 2; ++s)
        for (std::uint64_t i = 0; i < 20000; ++i)
            keys.push_back(derive_key(9000 + s, stream_tag::seed, i));
    std::sort(keys.begin(), keys.end());
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("adaptive quadrature hits analytic integrals") {
    CHECK(std::abs(integrate([](double x) { return x * x; }, 0.0, 1.0) -
                   1.0 / 3.0) < 1e-12);
    CHECK(std::abs(integrate([](double x) { return std::sin(x); }, 0.0,
                             3.141592653589793) -
                   2.0) < 1e-10);
    // Tail integral of exp(-t) over [2, inf) = exp(-2).
    CHECK(std::abs(integrate_tail([](double t) { return std::exp(-t); },
                                  2.0) -
                   std::exp(-2.0)) < 1e-10);
    // Tail integral of t^-3 over [1, inf) = 1/2.
    CHECK(std::abs(integrate_tail([](double t) { return std::pow(t, -3.0); },
                                  1.0) -
                   0.5) < 1e-10);
    CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0) == 0.0);
}

TEST_CASE("one-sample KS statistic on a hand-computed case") {
    // Sample {0.1, 0.5, 0.9} against the uniform CDF on [0,1]:
    // deviations i/n - F = {0.2333.., 0.1666.., 0.1}, F - (i-1)/n max 0.2333..
    const std::vector<double> sample{0.1, 0.5, 0.9};
    const double d =
        ks_statistic(sample, [](double x) { return std::min(1.0, x); });
    CHECK(std::abs(d - (1.0 / 3.0 - 0.1)) < 1e-12);
}

TEST_CASE("two-sample KS handles atoms") {
    // a = {0,0,1}, b = {0,1,1}: F_a(0)=2/3, F_b(0)=1/3 -> D = 1/3.
    const std::vector<double> a{0.0, 0.0, 1.0}, b{0.0, 1.0, 1.0};
    CHECK(std::abs(ks_two_sample(a, b) - 1.0 / 3.0) < 1e-12);
    CHECK(ks_two_sample(a, a) == 0.0);
}

TEST_CASE("KS distance of a true uniform sample is small") {
    counter_rng rng(1234);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = rng.uniform01();
    std::sort(xs.begin(), xs.end());
    const double d =
        ks_statistic(xs, [](double x) { return std::min(1.0, std::max(0.0, x)); });
    // 99.9%-ile of D_n is about 1.95/sqrt(n).
    CHECK(d < 1.95 / std::sqrt(double(xs.size())));
    CHECK(kolmogorov_pvalue(d, xs.size()) > 0.001);
}

TEST_CASE("kolmogorov p-value endpoints") {
    CHECK(kolmogorov_pvalue(0.0, 100) == doctest::Approx(1.0));
    CHECK(kolmogorov_pvalue(1.0, 100) == doctest::Approx(0.0));
    // Known critical point: P[sqrt(n) D > 1.3581] ~= 0.05.
    CHECK(kolmogorov_pvalue(1.3581 / std::sqrt(1000.0), 1000) ==
          doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("chi-square goodness of fit") {
    // Perfect fit: statistic ~ 0, p ~ 1.
    const std::vector<std::int64_t> counts{250, 250, 250, 250};
    const std::vector<double> probs{0.25, 0.25, 0.25, 0.25};
    const auto r = chi_square_gof(counts, 1000, probs);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value > 0.99);

    // Gross misfit rejects.
    const auto bad =
        chi_square_gof({900, 50, 25, 25}, 1000, probs);
    CHECK(bad.p_value < 1e-6);

    // Sparse cells are pooled, not fatal.
    const auto sparse = chi_square_gof({995, 3, 2}, 1000,
                                       {0.995, 0.003, 0.002});
    CHECK(sparse.p_value > 0.001);
}

TEST_CASE("binomial stderr") {
    CHECK(binomial_stderr(0.5, 10000) ==
          doctest::Approx(0.005).epsilon(1e-9));
    CHECK(binomial_stderr(0.0, 100) >= 0.0);
}
