#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dspr/dictionary.hpp"
#include "dspr/measurement.hpp"
#include "dspr/rng.hpp"

namespace dspr {

// Sampling request for the restricted-isometry constants of A over
// dictionary-conjugated test matrices D Z D* with rank(Z) <= s and at most
// k nonzero rows. q = 1 selects the l1 flavor (with the 1/m factor),
// q < 1 the lq flavor (no 1/m); the two normalizations are never mixed.
struct DripQuery {
    int s = 2;
    int k = 2;
    double q = 1.0;
    int num_samples = 1000;
    bool enumerate_supports = false;
};

// Sampled two-sided estimate. `lower` (the smallest ratio seen) is an upper
// bound on the true lower constant, and `upper` a lower bound on the true
// upper constant: sampling only tightens the interval inward.
struct DripEstimate {
    double lower = 0.0;
    double upper = 0.0;
    CMat lower_witness;
    CMat upper_witness;
    long samples_used = 0;
};

// Random Z = sum_j sigma_j g_j g_j^* with k-sparse shared support, unit
// Gaussian factors g_j and independent signs sigma_j in {-1, +1}; rank <= s,
// row sparsity <= k. The random signs make indefinite matrices (differences
// of rank-one lifts) well represented at s = 2.
CMat sample_test_matrix(int N, int s, int k, std::uint64_t seed);

// Same, with a fixed support and optional forced signs (one per factor).
CMat sample_test_matrix_on_support(int N, int s, const IndexSet& support, Rng& rng,
                                   const std::vector<int>* forced_signs = nullptr);

// q = 1: (1/m) ||A(D Z D*)||_1 / ||D Z D*||_F
// q < 1:       ||A(D Z D*)||_q^q / ||D Z D*||_F^q
double drip_ratio(const Dictionary& dict, const MeasurementEnsemble& ens, const CMat& Z, double q);

// The lq-flavor ratio (no 1/m) for any q in (0,1], including q = 1. At q = 1
// this is exactly m times drip_ratio.
double drip_ratio_lq(const Dictionary& dict, const MeasurementEnsemble& ens, const CMat& Z, double q);

// Plain RIP ratio (1/m) ||A(X)||_1 / ||X||_F on Hermitian X directly; with an
// identity dictionary drip_ratio reduces to this.
double rip_ratio(const MeasurementEnsemble& ens, const CMat& X);

// Evaluates drip_ratio over sampled test matrices (plus any explicitly
// provided candidates) and reports the extremes with their witnesses. With
// enumerate_supports set and C(N, k) <= 10^4, every support receives at
// least num_samples / C(N, k) draws. When ratios_out is non-null every
// evaluated ratio is appended to it.
DripEstimate estimate_drip(const Dictionary& dict, const MeasurementEnsemble& ens,
                           const DripQuery& query, std::uint64_t seed,
                           const std::vector<CMat>& extra_candidates = {},
                           std::vector<double>* ratios_out = nullptr);

struct ConditionResult {
    bool holds = false;
    double margin = 0.0;
};

// margin = alpha - 4 beta / sqrt(r) - beta / r, positive iff recovery holds.
ConditionResult l1_recovery_condition(double alpha, double beta, double r);

// C = (1/r + 4/sqrt(r) + 1) / (alpha - 4 beta/sqrt(r) - beta/r); requires the
// condition to hold.
double l1_stability_constant(double alpha, double beta, double r);

// margin = phi - psi (r^{q-2} + 2^{2+q/2} r^{q/2-1}); requires r > 1.
ConditionResult lq_recovery_condition(double phi, double psi, double r, double q);

struct ErrorBounds {
    double lifted = 0.0;       // 2 C eps / sqrt(m)
    double vector_scale = 0.0; // 2 sqrt(2) C eps / sqrt(m); divide by ||x0||_2
};

ErrorBounds theoretical_error_bound(double C, double epsilon, int m);

// C(n, k) clipped at cap + 1 to avoid overflow during enumeration checks.
long long binomial_capped(int n, int k, long long cap);

// All k-subsets of {0..n-1} in lexicographic order; caller must have checked
// the count is manageable.
std::vector<std::vector<int>> enumerate_supports(int n, int k);

// JSON report of an estimate run; `ratios` is the full sample set (used for
// the concentration-band fraction), `band` the reference interval.
std::string drip_report_json(const Dictionary& dict, const MeasurementEnsemble& ens,
                             const DripQuery& query, const DripEstimate& estimate,
                             const std::vector<double>& ratios, double condition_r,
                             double band_lo, double band_hi);

} // namespace dspr
