#include <doctest.h>

#include <cmath>

#include "dspr/core.hpp"
#include "dspr/lemmas.hpp"
#include "dspr/rng.hpp"

using namespace dspr;

namespace {

// Feasible (v, k, mu) triple with nontrivial mass; entries may be signed.
struct Triple {
    RVec v;
    int k;
    double mu;
};

Triple random_feasible_triple(Rng& rng, int max_dim) {
    const int n = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_dim - 2)));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const double mu = 0.1 + 2.0 * rng.uniform();
    RVec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform();
    const double mass = v.sum();
    if (mass > 0.0) {
        const double target = (0.2 + 0.8 * rng.uniform()) * static_cast<double>(k) * mu;
        v *= target / mass;
    }
    for (int i = 0; i < n; ++i) {
        v(i) = std::min(v(i), mu);
        if (rng.below(2) == 0) v(i) = -v(i); // signs are the caller's business
    }
    return {std::move(v), k, mu};
}

ProblemInstance tiny_instance(int n, int N, int m, int k, DictionaryFamily family, double r,
                              double epsilon, std::uint64_t seed) {
    InstanceParams params;
    params.n = n;
    params.N = N;
    params.m = m;
    params.k = k;
    params.family = family;
    params.epsilon = epsilon;
    params.r = r;
    return make_instance(params, seed);
}

} // namespace

TEST_CASE("sparse decomposition of an already sparse vector") {
    RVec v(4);
    v << 0.5, 0.0, -0.3, 0.0;
    const auto dec = sparse_convex_decompose(v, 2, 1.0);
    CHECK(dec.atoms.size() == 1);
    CHECK(dec.weights[0] == doctest::Approx(1.0));
    CHECK((dec.atoms[0] - v).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(validate_decomposition(dec, v, 2, 1.0).ok);
}

TEST_CASE("hand-checked dense decomposition") {
    RVec v(3);
    v << 1.0, 0.5, 0.5;
    const auto dec = sparse_convex_decompose(v, 2, 1.0);
    const auto check = validate_decomposition(dec, v, 2, 1.0);
    CHECK(check.ok);
    INFO(check.detail);
}

TEST_CASE("zero vector decomposes trivially") {
    const RVec v = RVec::Zero(5);
    const auto dec = sparse_convex_decompose(v, 2, 0.5);
    CHECK(validate_decomposition(dec, v, 2, 0.5).ok);
}

TEST_CASE("decomposition preconditions are enforced") {
    RVec v(3);
    v << 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(sparse_convex_decompose(v, 2, 1.0), InvalidParameter); // l1 = 3 > 2
    RVec w(2);
    w << 1.5, 0.1;
    CHECK_THROWS_AS(sparse_convex_decompose(w, 2, 1.0), InvalidParameter); // linf > mu
    CHECK_THROWS_AS(sparse_convex_decompose(w, 0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(sparse_convex_decompose(w, 2, 0.0), InvalidParameter);
}

TEST_CASE("validator and atom bound over random feasible triples") {
    Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto t = random_feasible_triple(rng, 24);
        const auto dec = sparse_convex_decompose(t.v, t.k, t.mu);
        const auto check = validate_decomposition(dec, t.v, t.k, t.mu);
        INFO("trial ", trial, ": ", check.detail);
        REQUIRE(check.ok);
        const double bound = std::sqrt(t.mu * t.v.cwiseAbs().sum()) + 1e-10;
        for (const auto& atom : dec.atoms) CHECK(atom.norm() <= bound);
    }
}

TEST_CASE("validator rejects corrupted decompositions") {
    RVec v(3);
    v << 1.0, 0.5, 0.5;
    auto dec = sparse_convex_decompose(v, 2, 1.0);

    auto bad = dec;
    bad.weights[0] += 0.25;
    CHECK_FALSE(validate_decomposition(bad, v, 2, 1.0).ok);

    bad = dec;
    bad.atoms[0](0) += 0.5;
    CHECK_FALSE(validate_decomposition(bad, v, 2, 1.0).ok);

    bad = dec;
    for (auto& atom : bad.atoms) atom = RVec::Zero(3);
    CHECK_FALSE(validate_decomposition(bad, v, 2, 1.0).ok);
}

TEST_CASE("phase diagonal") {
    CVec w(3);
    w << cplx{2.0, 0.0}, cplx{0.0, 1.0}, cplx{-2.0, 0.0};
    const CVec ph = phase_diagonal(w);
    CHECK(std::abs(ph(0) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(ph(1) - cplx{0.0, 1.0}) < 1e-15);
    CHECK(std::abs(ph(2) - cplx{-1.0, 0.0}) < 1e-15);
    for (int i = 0; i < 3; ++i) {
        const cplx prod = std::conj(ph(i)) * w(i);
        CHECK(prod.imag() == doctest::Approx(0.0));
        CHECK(prod.real() >= 0.0);
    }
    CVec z = CVec::Zero(2);
    const CVec phz = phase_diagonal(z);
    CHECK(std::abs(phz(0) - cplx{1.0, 0.0}) < 1e-15);
}

TEST_CASE("partition follows the magnitude order") {
    CVec coeffs(6);
    coeffs << 5.0, 0.5, 3.0, 2.0, 1.0, 0.2;
    const IndexSet t0 = IndexSet::of({0, 1}, 6);
    const auto part = build_partition(coeffs, t0, 2.0, 1); // block size 2
    REQUIRE(part.blocks.size() == 2);
    CHECK(part.blocks[0].indices() == std::vector<int>{2, 3});
    CHECK(part.blocks[1].indices() == std::vector<int>{4, 5});
    CHECK(part.t01(6).indices() == std::vector<int>{0, 1, 2, 3});
    CHECK(part.t01_complement(6).indices() == std::vector<int>{4, 5});
}

TEST_CASE("partition tie-break is by ascending index") {
    CVec coeffs(5);
    coeffs << 9.0, 1.0, 1.0, 1.0, 1.0;
    const IndexSet t0 = IndexSet::of({0}, 5);
    const auto part = build_partition(coeffs, t0, 2.0, 1);
    REQUIRE(part.blocks.size() == 2);
    CHECK(part.blocks[0].indices() == std::vector<int>{1, 2});
    CHECK(part.blocks[1].indices() == std::vector<int>{3, 4});
}

TEST_CASE("partition blocks cover the complement and decay") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        const int N = 6 + static_cast<int>(rng.below(18));
        const int k = 1 + static_cast<int>(rng.below(3));
        const double r = 1.0 + 3.0 * rng.uniform();
        CVec coeffs(N);
        for (int i = 0; i < N; ++i) coeffs(i) = rng.cnormal();
        const int t0_size = std::min(N - 1, k);
        const IndexSet t0 = top_k_indices(coeffs, t0_size);
        const auto part = build_partition(coeffs, t0, r, k);

        // disjoint cover of the complement
        std::vector<int> seen;
        for (const auto& block : part.blocks)
            for (int j : block.indices()) seen.push_back(j);
        std::sort(seen.begin(), seen.end());
        CHECK(seen == IndexSet::complement(t0, N).indices());

        // every block's magnitudes dominate all later blocks
        for (std::size_t b = 0; b + 1 < part.blocks.size(); ++b) {
            double min_cur = std::numeric_limits<double>::infinity();
            for (int j : part.blocks[b].indices()) min_cur = std::min(min_cur, std::abs(coeffs(j)));
            for (std::size_t later = b + 1; later < part.blocks.size(); ++later) {
                for (int j : part.blocks[later].indices()) {
                    CHECK(std::abs(coeffs(j)) <= min_cur + 1e-12);
                }
            }
        }

        // tail inequality for i >= 2
        const double block = static_cast<double>(part.block_size);
        for (std::size_t b = 1; b < part.blocks.size(); ++b) {
            double norm2_sq = 0.0;
            for (int j : part.blocks[b].indices()) norm2_sq += std::norm(coeffs(j));
            double norm1_prev = 0.0;
            for (int j : part.blocks[b - 1].indices()) norm1_prev += std::abs(coeffs(j));
            CHECK(std::sqrt(norm2_sq) <= norm1_prev / std::sqrt(block) + 1e-12);
        }
    }
}

TEST_CASE("proof chains pass exactly at the planted signal") {
    struct Setup {
        DictionaryFamily family;
        int N;
        T0Choice choice;
    };
    // For redundant frames D* x0 has full support, so only the literal
    // analysis-support T0 zeroes the chain at the truth.
    const Setup setups[] = {
        {DictionaryFamily::identity, 8, T0Choice::top_k_analysis},
        {DictionaryFamily::identity, 8, T0Choice::support_z0},
        {DictionaryFamily::harmonic_frame, 12, T0Choice::analysis_support},
    };
    for (const auto& setup : setups) {
        const auto inst = tiny_instance(8, setup.N, 48, 2, setup.family, 2.0, 0.0, 5);

        // a random global phase must be removed by the internal alignment
        const CVec rotated = std::polar(1.0, 1.2345) * inst.x0;
        const auto l1_report = verify_l1_proof_chain(inst, rotated, 0.5, 1.5, setup.choice);
        for (const auto& check : l1_report.checks) {
            INFO(check.name, " lhs=", check.lhs, " rhs=", check.rhs);
            CHECK(check.passed);
        }
        for (double q : {1.0, 0.5}) {
            const auto lq_report = verify_lq_proof_chain(inst, rotated, q, setup.choice);
            for (const auto& check : lq_report.checks) {
                INFO(check.name, " lhs=", check.lhs, " rhs=", check.rhs);
                CHECK(check.passed);
            }
        }
    }
}

TEST_CASE("top-k T0 on a redundant frame leaves honest residual mass") {
    // The default T0 keeps only k of the truth's analysis coefficients; the
    // lifted-difference checks still hold at the truth, while the atom bound
    // compares leftover mass against a vanishing right-hand side.
    const auto inst = tiny_instance(8, 12, 48, 2, DictionaryFamily::harmonic_frame, 2.0, 0.0, 5);
    const auto report = verify_l1_proof_chain(inst, inst.x0, 0.5, 1.5, T0Choice::top_k_analysis);
    for (const char* name : {"cone_constraint", "tail_block_bound", "step1_aggregate",
                             "offdiag_measurement_bound", "tailtail_measurement_bound",
                             "final_assembly"}) {
        const auto* check = report.find(name);
        REQUIRE(check != nullptr);
        INFO(name, " lhs=", check->lhs, " rhs=", check->rhs);
        CHECK(check->passed);
    }
    const auto* atom = report.find("atom_norm_bound");
    REQUIRE(atom != nullptr);
    CHECK(atom->lhs > 0.0); // the leftover tail is real, not roundoff
}

TEST_CASE("corrupting the candidate flips the cone constraint") {
    const auto inst = tiny_instance(16, 16, 96, 2, DictionaryFamily::identity, 2.0, 0.0, 9);
    CVec corrupted = inst.x0;
    const IndexSet t0 = top_k_indices(analysis(inst.dict, inst.x0), 2);
    int injected = 0;
    for (int j = 0; j < 16 && injected < 4; ++j) {
        if (!t0.contains(j)) {
            corrupted(j) += 0.4 * std::polar(1.0, 0.3 * j);
            ++injected;
        }
    }
    const auto report = verify_l1_proof_chain(inst, corrupted, 0.5, 1.5);
    const auto* cone = report.find("cone_constraint");
    REQUIRE(cone != nullptr);
    CHECK_FALSE(cone->passed);

    const auto lq_report = verify_lq_proof_chain(inst, corrupted, 0.5);
    const auto* lq_cone = lq_report.find("lq_cone_constraint");
    REQUIRE(lq_cone != nullptr);
    CHECK_FALSE(lq_cone->passed);

    // the clean candidate still passes
    CHECK(verify_l1_proof_chain(inst, inst.x0, 0.5, 1.5).all_passed());
}

TEST_CASE("degenerate instances are rejected") {
    auto inst = tiny_instance(4, 4, 16, 1, DictionaryFamily::identity, 2.0, 0.0, 1);
    inst.x0 = CVec::Zero(4);
    CHECK_THROWS_AS(verify_l1_proof_chain(inst, inst.x0, 1.0, 1.0, T0Choice::support_z0),
                    DegenerateInput);
}

TEST_CASE("proof report csv shape") {
    const auto inst = tiny_instance(8, 8, 32, 2, DictionaryFamily::identity, 2.0, 0.0, 3);
    const auto report = verify_l1_proof_chain(inst, inst.x0, 1.0, 1.0);
    const auto csv = proof_report_csv(report);
    CHECK(csv.rfind("check_name,lhs,rhs,slack,passed\n", 0) == 0);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == report.checks.size() + 1);
}
