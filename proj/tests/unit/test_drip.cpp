#include <doctest.h>

#include "dspr/core.hpp"
#include "dspr/drip.hpp"

using namespace dspr;

namespace {

// Ensemble of scaled standard basis vectors; its quadratic map reads off the
// diagonal and is blind to off-diagonal mass.
MeasurementEnsemble basis_ensemble(int n, double scale) {
    CMat a = scale * CMat::Identity(n, n);
    return explicit_ensemble(std::move(a));
}

CMat offdiag_pair(int n, int i, int j) {
    CMat z = CMat::Zero(n, n);
    z(i, j) = 1.0;
    z(j, i) = 1.0;
    return z;
}

} // namespace

TEST_CASE("sampled test matrices satisfy their rank and row-sparsity bounds") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const int N = 10;
        const int s = 1 + static_cast<int>(seed % 3);
        const int k = 2 + static_cast<int>(seed % 4);
        const CMat z = sample_test_matrix(N, s, k, seed);
        CHECK(core::hermitian_deviation(z) < 1e-12);
        CHECK(core::numerical_rank(z) <= s);
        CHECK(core::row_sparsity(z) <= k);
    }
}

TEST_CASE("forced-sign sampling produce the expected spectra") {
    Rng rng(5);
    const IndexSet support = IndexSet::of({1, 3, 4}, 8);

    const std::vector<int> plus = {1};
    const CMat psd = sample_test_matrix_on_support(8, 1, support, rng, &plus);
    const RVec evals = core::hermitian_eigenvalues(psd);
    CHECK(evals.minCoeff() > -1e-12);
    CHECK(core::numerical_rank(psd) == 1);

    // orthogonal +1/-1 pair has eigenvalues {+1, -1}
    CMat z = CMat::Zero(4, 4);
    CVec g1 = CVec::Zero(4), g2 = CVec::Zero(4);
    g1(0) = 1.0;
    g2(1) = 1.0;
    z += g1 * g1.adjoint();
    z -= g2 * g2.adjoint();
    const RVec ev = core::hermitian_eigenvalues(z);
    CHECK(ev.minCoeff() == doctest::Approx(-1.0));
    CHECK(ev.maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("indefinite samples are common at s = 2") {
    // Sign pattern (+,-) or (-,+) has probability exactly 1/2; allow binomial
    // noise around it.
    int indefinite = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
        const CMat z = sample_test_matrix(12, 2, 3, 1000 + static_cast<std::uint64_t>(t));
        const RVec evals = core::hermitian_eigenvalues(z);
        if (evals.minCoeff() < -1e-10 && evals.maxCoeff() > 1e-10) ++indefinite;
    }
    CHECK(indefinite >= static_cast<int>(0.44 * trials));
}

TEST_CASE("drip ratio on the diagonal-blind ensemble") {
    const auto dict = make_dictionary(DictionaryFamily::identity, 4, 4, 0);
    const auto ens = basis_ensemble(4, 2.0);
    const CMat z = offdiag_pair(4, 0, 1);
    CHECK(drip_ratio(dict, ens, z, 1.0) == doctest::Approx(0.0));

    // homogeneity
    const CMat z2 = sample_test_matrix(4, 2, 2, 9);
    const double r1 = drip_ratio(dict, ens, z2, 1.0);
    const double r2 = drip_ratio(dict, ens, 2.0 * z2, 1.0);
    CHECK(r1 == doctest::Approx(r2).epsilon(1e-12));
    const double q1 = drip_ratio(dict, ens, z2, 0.5);
    const double q2 = drip_ratio(dict, ens, 3.0 * z2, 0.5);
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));

    CHECK_THROWS_AS(drip_ratio(dict, ens, CMat::Zero(4, 4), 1.0), DegenerateInput);
}

TEST_CASE("lq ratio at q = 1 is exactly m times the l1 ratio") {
    const auto dict = make_dictionary(DictionaryFamily::harmonic_frame, 4, 8, 0);
    const auto ens = gaussian_ensemble(24, 4, 55);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const CMat z = sample_test_matrix(8, 2, 3, seed);
        const double l1 = drip_ratio(dict, ens, z, 1.0);
        const double lq = drip_ratio_lq(dict, ens, z, 1.0);
        CHECK(lq == doctest::Approx(24.0 * l1).epsilon(1e-12));
    }
}

TEST_CASE("identity dictionary reduces drip to plain rip on identical samples") {
    const auto dict = make_dictionary(DictionaryFamily::identity, 6, 6, 0);
    const auto ens = gaussian_ensemble(30, 6, 123);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const CMat z = sample_test_matrix(6, 2, 2, seed);
        CHECK(drip_ratio(dict, ens, z, 1.0) == doctest::Approx(rip_ratio(ens, z)).epsilon(1e-12));
    }
}

TEST_CASE("estimate_drip basics") {
    const auto dict = make_dictionary(DictionaryFamily::identity, 6, 6, 0);
    const auto ens = gaussian_ensemble(40, 6, 321);
    DripQuery query;
    query.s = 2;
    query.k = 2;
    query.num_samples = 200;

    const auto est1 = estimate_drip(dict, ens, query, 99);
    const auto est2 = estimate_drip(dict, ens, query, 99);
    CHECK(est1.lower == est2.lower);
    CHECK(est1.upper == est2.upper);
    CHECK(est1.lower <= est1.upper);
    CHECK(est1.samples_used == 200);

    // witnesses satisfy the feasibility constraints they were sampled from
    CHECK(core::numerical_rank(est1.lower_witness) <= 2);
    CHECK(core::row_sparsity(est1.lower_witness) <= 2);
    CHECK(core::numerical_rank(est1.upper_witness) <= 2);
    CHECK(core::row_sparsity(est1.upper_witness) <= 2);

    // more samples only tighten inward
    DripQuery more = query;
    more.num_samples = 800;
    const auto est3 = estimate_drip(dict, ens, more, 99);
    CHECK(est3.lower <= est1.lower + 1e-15);
    CHECK(est3.upper >= est1.upper - 1e-15);
}

TEST_CASE("estimate_drip with the constructed off-diagonal witness") {
    const auto dict = make_dictionary(DictionaryFamily::identity, 4, 4, 0);
    const auto ens = basis_ensemble(4, 1.0);
    DripQuery query;
    query.s = 2;
    query.k = 2;
    query.num_samples = 50;
    const std::vector<CMat> probes = {offdiag_pair(4, 0, 1)};
    const auto est = estimate_drip(dict, ens, query, 7, probes);
    CHECK(est.lower == doctest::Approx(0.0));
    CHECK(core::entrywise_lq_norm(est.lower_witness.diagonal().asDiagonal(), 1.0) <
          1e-12); // witness is the off-diagonal probe
}

TEST_CASE("support enumeration visits every support") {
    const auto supports = enumerate_supports(5, 2);
    CHECK(supports.size() == 10);
    CHECK(binomial_capped(5, 2, 10000) == 10);
    CHECK(binomial_capped(100, 50, 10000) == 10001); // capped

    const auto dict = make_dictionary(DictionaryFamily::identity, 5, 5, 0);
    const auto ens = gaussian_ensemble(20, 5, 77);
    DripQuery query;
    query.s = 1;
    query.k = 2;
    query.num_samples = 30;
    query.enumerate_supports = true;
    const auto est = estimate_drip(dict, ens, query, 3);
    CHECK(est.samples_used == 30); // ceil(30/10) = 3 per support
}

TEST_CASE("l1 recovery condition and stability constant") {
    const auto c1 = l1_recovery_condition(1.0, 0.2, 4.0);
    CHECK(c1.holds);
    CHECK(c1.margin == doctest::Approx(0.55).epsilon(1e-14));

    const auto c2 = l1_recovery_condition(0.12, 2.45, 100.0);
    CHECK_FALSE(c2.holds);
    CHECK(c2.margin == doctest::Approx(0.12 - 0.98 - 0.0245).epsilon(1e-12));

    const auto c3 = l1_recovery_condition(1.0, 0.2, 100.0);
    CHECK(c3.holds);
    CHECK(c3.margin == doctest::Approx(0.918).epsilon(1e-14));

    CHECK(l1_stability_constant(1.0, 0.2, 100.0) ==
          doctest::Approx(1.41 / 0.918).epsilon(1e-14));
    CHECK(l1_stability_constant(1.0, 0.2, 4.0) ==
          doctest::Approx(3.25 / 0.55).epsilon(1e-14));
    CHECK_THROWS_AS(l1_stability_constant(0.12, 2.45, 100.0), PreconditionViolation);
    CHECK_THROWS_AS(l1_recovery_condition(0.0, 0.2, 4.0), InvalidParameter);

    // C decreases in r once feasible
    double prev = std::numeric_limits<double>::infinity();
    for (double r = 10.0; r <= 1e4; r *= 1.25) {
        const double c = l1_stability_constant(1.0, 0.2, r);
        CHECK(c < prev);
        prev = c;
    }
}

TEST_CASE("lq recovery condition") {
    const auto a = lq_recovery_condition(1.0, 1.0, 16.0, 0.5);
    CHECK(a.holds);
    CHECK(a.margin == doctest::Approx(1.0 - 0.6102285575013605).epsilon(1e-12));

    const auto b = lq_recovery_condition(1.0, 1.0, 64.0, 1.0);
    CHECK(b.holds);
    CHECK(b.margin == doctest::Approx(1.0 - 0.7227317811865476).epsilon(1e-12));

    const auto c = lq_recovery_condition(0.5, 1.0, 16.0, 0.5);
    CHECK_FALSE(c.holds);
    CHECK(c.margin == doctest::Approx(0.5 - 0.6102285575013605).epsilon(1e-12));

    CHECK_THROWS_AS(lq_recovery_condition(1.0, 1.0, 1.0, 0.5), InvalidParameter);
}

TEST_CASE("theoretical error bound") {
    const auto zero = theoretical_error_bound(1.5, 0.0, 100);
    CHECK(zero.lifted == 0.0);
    CHECK(zero.vector_scale == 0.0);

    const auto b = theoretical_error_bound(1.536, 0.1, 100);
    CHECK(b.lifted == doctest::Approx(0.03072).epsilon(1e-12));
    CHECK(b.vector_scale / b.lifted == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}
