#include <doctest.h>

#include <vector>

#include "dspr/kernels.hpp"
#include "dspr/rng.hpp"

using dspr::Rng;
using dspr::kernels::cplx;

namespace {

std::vector<cplx> random_vec(Rng& rng, std::size_t n) {
    std::vector<cplx> v(n);
    for (auto& z : v) z = rng.cnormal() * (1.0 + 3.0 * rng.uniform());
    return v;
}

} // namespace

TEST_CASE("scalar kernels match straightforward definitions") {
    const std::vector<cplx> a = {{1.0, 2.0}, {-3.0, 0.5}, {0.0, -1.0}};
    const std::vector<cplx> b = {{2.0, 0.0}, {1.0, 1.0}, {0.5, 0.5}};

    CHECK(dspr::kernels::scalar::sum_sq_mag(a.data(), 3) ==
          doctest::Approx(5.0 + 9.25 + 1.0).epsilon(1e-15));

    const cplx d = dspr::kernels::scalar::cdot(a.data(), b.data(), 3);
    cplx expect{0.0, 0.0};
    for (int i = 0; i < 3; ++i) expect += std::conj(a[std::size_t(i)]) * b[std::size_t(i)];
    CHECK(std::abs(d - expect) < 1e-14);
}

TEST_CASE("soft threshold kills small entries and shrinks large ones") {
    const std::vector<cplx> v = {{3.0, 4.0}, {0.1, 0.0}, {0.0, 0.0}};
    std::vector<cplx> out(3);
    dspr::kernels::scalar::soft_threshold(v.data(), 1.0, out.data(), 3);
    CHECK(std::abs(out[0] - cplx{3.0, 4.0} * 0.8) < 1e-14); // |v|=5 -> scale 4/5
    CHECK(out[1] == cplx{0.0, 0.0});
    CHECK(out[2] == cplx{0.0, 0.0});
}

#if DSPR_HAVE_AVX2_BACKEND
TEST_CASE("avx2 kernels agree with scalar reference") {
    if (!dspr::kernels::avx2_supported()) return;
    Rng rng(42);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{3}, std::size_t{7},
                          std::size_t{64}, std::size_t{257}}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);

        const double s_ref = dspr::kernels::scalar::sum_sq_mag(a.data(), n);
        CHECK(dspr::kernels::avx2::sum_sq_mag(a.data(), n) ==
              doctest::Approx(s_ref).epsilon(1e-13));

        const double m_ref = dspr::kernels::scalar::sum_mag(a.data(), n);
        CHECK(dspr::kernels::avx2::sum_mag(a.data(), n) == doctest::Approx(m_ref).epsilon(1e-13));

        const cplx d_ref = dspr::kernels::scalar::cdot(a.data(), b.data(), n);
        const cplx d_vec = dspr::kernels::avx2::cdot(a.data(), b.data(), n);
        CHECK(std::abs(d_ref - d_vec) <=
              1e-13 * (1.0 + std::abs(d_ref)) * static_cast<double>(n));

        auto y_ref = b;
        auto y_vec = b;
        const cplx alpha = rng.cnormal();
        dspr::kernels::scalar::caxpy(alpha, a.data(), y_ref.data(), n);
        dspr::kernels::avx2::caxpy(alpha, a.data(), y_vec.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y_ref[i] - y_vec[i]) < 1e-13);

        std::vector<cplx> o_ref(n), o_vec(n);
        const double threshold = 0.5 + rng.uniform();
        dspr::kernels::scalar::soft_threshold(a.data(), threshold, o_ref.data(), n);
        dspr::kernels::avx2::soft_threshold(a.data(), threshold, o_vec.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o_ref[i] - o_vec[i]) < 1e-13);

        std::vector<double> weights(n);
        for (auto& w : weights) w = rng.uniform() * 2.0;
        dspr::kernels::scalar::soft_threshold_weighted(a.data(), weights.data(), o_ref.data(), n);
        dspr::kernels::avx2::soft_threshold_weighted(a.data(), weights.data(), o_vec.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(o_ref[i] - o_vec[i]) < 1e-13);
    }
}
#endif

TEST_CASE("dispatched kernels report a backend") {
    const std::string name = dspr::kernels::backend_name();
    CHECK((name == "avx2" || name == "scalar"));
}
