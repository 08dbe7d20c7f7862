#pragma once

#include "pyroscale/law.hpp"
#include "pyroscale/limit_lff.hpp"
#include "pyroscale/rng.hpp"

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace pyroscale {

// One comparison cell of an estimator report.  Verdicts are pure functions
// of the stored numbers, so a report can be re-audited from its CSV.
struct stats_cell {
    std::string bin;
    double target;
    double empirical;
    double std_error;
    std::int64_t n;
    bool pass;
};

struct stats_report {
    std::string estimator;
    std::string param;  // semicolon-separated key=value pairs (CSV-safe)
    std::vector<stats_cell> cells;

    bool pass() const;
    // Schema: estimator,param,bin,target,empirical,stderr,N,verdict
    void write_csv(std::ostream& out) const;
};

// ---------------------------------------------------------------------------
// Exact cluster-size laws (bounded-support regime)
// ---------------------------------------------------------------------------

// Probability that the cluster of a fixed site has k sites after growing from
// empty for a fraction z of the gap supremum T:
//   q_0(z) = nu((zT, T)),   q_k(z) = k [nu((zT, T))]^2 [nu((0, zT))]^k.
double qk_of_z(const law_spec& law, int k, double z);

// Average of qk_of_z over z uniform on [0,1] (adaptive quadrature, absolute
// error well under 1e-10).
double qk_bar(const law_spec& law, int k);

// ---------------------------------------------------------------------------
// Monte Carlo estimators
// ---------------------------------------------------------------------------

// Empirical law of the cluster size at site 0 of the discrete process at
// rescaled time t versus its limit: exact q_k(min(t,1)) with fires disabled,
// Monte Carlo E[q_k(Z_t(0))] over `limit_replicas` bounded-support limit
// trajectories with fires on.  With fires on, the verdict lives in the final
// "tv" cell (half L1 distance over k <= kmax, a declared policy tolerance);
// per-k cells are informational.
stats_report cluster_size_histogram(const law_spec& seed_law, double lambda,
                                    double t, double half_width, int kmax,
                                    std::int64_t replicas,
                                    std::int64_t limit_replicas,
                                    bool fires_enabled, double tv_tolerance,
                                    std::uint64_t key, unsigned jobs = 1);

// Cluster-length law of the degenerate limit process: exact survival
// P[|D| >= B] = (B+1) e^{-B} and mean 2.
stats_report macro_tail_zero(std::int64_t replicas, std::uint64_t key,
                             unsigned jobs = 1);

// Cluster-length tail of a barrier-type limit process at time t (>= 3/2 for
// the sandwich to apply): survival ratios P[>=B+1]/P[>=B] must stay inside
// (0.05, 0.95) for B in {0.5, 1.0, 1.5}, and interior lengths must show no
// repeated values (the length law has no atoms; spans clipped by the box are
// excluded).
stats_report macro_tail_barrier(barrier_height_rule rule,
                                std::optional<law_spec> law,
                                double half_width, double t,
                                std::int64_t replicas, std::uint64_t key,
                                unsigned jobs = 1);

// Edge-mass law of the coalescent occupation toy at time t: a uniformly
// chosen edge lies in a particle of mass m with probability
//   rho_m(t) = m (2/(2+t))^2 (t/(2+t))^{m-1}.
// Cells: per-m frequencies, |rho_hat_1 - rho_1| (policy 0.01), and a
// chi-square fit over m <= m_max (pass when p > 0.001).
stats_report kingman_check(std::int64_t n_sites, double t, int m_max,
                           std::int64_t edges, std::uint64_t key);

// Long-gap counts of a stationary stream: S = epochs in [0, a t] whose gap
// from the previous epoch is >= a l; R = gaps starting in [0, a t] of length
// >= a l.  Both have exact mean (a t / m) * mu((a l, inf)) at every lambda.
stats_report gap_count_statistic(const law_spec& law, double lambda, double t,
                                 double l, std::int64_t replicas,
                                 std::uint64_t key, unsigned jobs = 1);

// Asymptotics of the same counts along a lambda grid (polynomial-tail laws):
// P[S=1] / (t lambda a beta l^{-beta-1}) should rise toward 1, and
// P[S>=2]/(lambda a)^2 must stay bounded (non-explosion, policy bound).
stats_report gap_count_asymptotics(const law_spec& law,
                                   const std::vector<double>& lambda_grid,
                                   double t, double l, std::int64_t replicas,
                                   std::uint64_t key, unsigned jobs = 1);

// One draw of the rescaled regrowth delay: grow an empty lattice with
// stationary seed streams, mark sites with an epoch in (a t0, a t1] occupied,
// burn the run through site 0, and return the largest residual wait after
// a t1 over the run, divided by a and capped at 1 (site 0 vacant gives 0).
double sample_theta_lambda(const law_spec& law, double a_lambda, double t0,
                           double t1, counter_rng& rng);

// P[|theta^lambda - (t1-t0)| >= eps] along a lambda grid: the sequence must
// be non-increasing and end below 0.1 (policy; the limit statement carries no
// rate).
stats_report theta_lambda_convergence(const law_spec& law,
                                      const std::vector<double>& lambda_grid,
                                      double t0, double t1,
                                      std::int64_t replicas, double eps,
                                      std::uint64_t key, unsigned jobs = 1);

} // namespace pyroscale
