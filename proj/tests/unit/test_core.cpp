#include <doctest.h>

#include "dspr/core.hpp"
#include "dspr/rng.hpp"

using namespace dspr;

namespace {

CMat random_hermitian(Rng& rng, int n) {
    CMat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.cnormal();
    return core::hermitian_part(a);
}

CVec random_cvec(Rng& rng, int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.cnormal();
    return v;
}

CMat unit_entry(int n, int i, int j) {
    CMat e = CMat::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

} // namespace

TEST_CASE("frobenius norm on canonical matrices") {
    CHECK(core::frobenius_norm(unit_entry(3, 0, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(core::frobenius_norm(CMat::Zero(3, 3)) == 0.0);
    const CMat x = unit_entry(3, 0, 1) + unit_entry(3, 1, 0);
    CHECK(core::frobenius_norm(x) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("entrywise lq norm") {
    CHECK(core::entrywise_lq_norm(unit_entry(2, 0, 0), 0.5) == doctest::Approx(1.0));
    const CMat offdiag = unit_entry(2, 0, 1) + unit_entry(2, 1, 0);
    CHECK(core::entrywise_lq_norm(offdiag, 1.0) == doctest::Approx(2.0));
    CMat diag = CMat::Zero(2, 2);
    diag(0, 0) = 4.0;
    CHECK(core::entrywise_lq_norm(diag, 0.5) == doctest::Approx(2.0));
    CHECK_THROWS_AS(core::entrywise_lq_norm(diag, 0.0), InvalidParameter);
    CHECK_THROWS_AS(core::entrywise_lq_norm(diag, 1.5), InvalidParameter);
}

TEST_CASE("row sparsity counts nonzero rows") {
    CMat z = CMat::Zero(3, 3);
    z(0, 0) = 1.0;
    z(2, 2) = 2.0;
    CHECK(core::row_sparsity(z) == 2);
    CHECK(core::row_sparsity(CMat::Zero(4, 4)) == 0);

    Rng rng(7);
    CVec x = CVec::Zero(5);
    x(1) = rng.cnormal();
    x(2) = rng.cnormal();
    x(4) = rng.cnormal();
    const CMat outer = x * x.adjoint();
    CHECK(core::row_sparsity(outer) == 3);
}

TEST_CASE("numerical rank") {
    Rng rng(11);
    const CVec x = random_cvec(rng, 5);
    CHECK(core::numerical_rank(x * x.adjoint()) == 1);
    CHECK(core::numerical_rank(CMat::Zero(4, 4)) == 0);
    CVec u = random_cvec(rng, 5), v = random_cvec(rng, 5);
    const CMat indefinite = u * u.adjoint() - v * v.adjoint();
    CHECK(core::numerical_rank(indefinite) == 2);
}

TEST_CASE("hermitian top eigenpair") {
    CMat x = CMat::Zero(3, 3);
    x(0, 0) = 3.0;
    auto [lambda, vec] = core::hermitian_top_eigenpair(x);
    CHECK(lambda == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(vec(0)) == doctest::Approx(1.0).epsilon(1e-12));

    auto [lid, vid] = core::hermitian_top_eigenpair(CMat::Identity(2, 2));
    CHECK(lid == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(core::norm2(vid) == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(3);
    CVec g = random_cvec(rng, 4);
    g *= 2.0 / core::norm2(g);
    auto [l4, v4] = core::hermitian_top_eigenpair(g * g.adjoint());
    CHECK(l4 == doctest::Approx(4.0).epsilon(1e-10));
    // eigenvector matches g/2 up to a unimodular phase
    CHECK(std::abs(core::inner(v4, g)) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("hermiticity is preserved by addition, real scaling and conjugation") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const CMat x = random_hermitian(rng, 6);
        const CMat y = random_hermitian(rng, 6);
        CHECK(core::hermitian_deviation(x + y) < 1e-12);
        CHECK(core::hermitian_deviation(1.75 * x) < 1e-12);
        CMat p(6, 6);
        for (int j = 0; j < 6; ++j)
            for (int i = 0; i < 6; ++i) p(i, j) = rng.cnormal();
        CHECK(core::hermitian_deviation(p * x * p.adjoint()) < 1e-10);
    }
}

TEST_CASE("frobenius norm squared equals sum of squared eigenvalues") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const CMat x = random_hermitian(rng, 8);
        const RVec evals = core::hermitian_eigenvalues(x);
        const double fro_sq = core::frobenius_norm(x) * core::frobenius_norm(x);
        CHECK(fro_sq == doctest::Approx(evals.squaredNorm()).epsilon(1e-8));
    }
}

TEST_CASE("entrywise l1 dominates frobenius") {
    Rng rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const CMat x = random_hermitian(rng, 5);
        CHECK(core::entrywise_lq_norm(x, 1.0) >= core::frobenius_norm(x) - 1e-12);
    }
}

TEST_CASE("row sparsity of an outer product counts the vector support") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        CVec x = CVec::Zero(8);
        const int nnz = 1 + static_cast<int>(rng.below(7));
        const auto support = rng.subset(8, nnz);
        for (int j : support) x(j) = rng.cnormal();
        int actual = 0;
        for (int i = 0; i < 8; ++i)
            if (std::abs(x(i)) > kZeroTol) ++actual;
        CHECK(core::row_sparsity(x * x.adjoint()) == actual);
    }
}

TEST_CASE("index sets validate and complement") {
    CHECK_THROWS_AS(IndexSet::of({3, 1}, 5), InvalidParameter);
    CHECK_THROWS_AS(IndexSet::of({0, 5}, 5), InvalidParameter);
    const IndexSet s = IndexSet::of({1, 3}, 5);
    const IndexSet c = IndexSet::complement(s, 5);
    CHECK(c.indices() == std::vector<int>{0, 2, 4});
    CHECK(IndexSet::unite(s, c, 5).size() == 5);
    CHECK(s.contains(3));
    CHECK_FALSE(s.contains(2));
}
