#include "dspr/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace dspr::kernels {

namespace scalar {

double sum_sq_mag(const cplx* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
    }
    return acc;
}

double sum_mag(const cplx* v, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
    }
    return acc;
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double ar = alpha.real(), ai = alpha.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx{ar * xr - ai * xi, ar * xi + ai * xr};
    }
}

void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
        out[i] = mag > t ? v[i] * ((mag - t) / mag) : cplx{0.0, 0.0};
    }
}

void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
        out[i] = mag > t[i] ? v[i] * ((mag - t[i]) / mag) : cplx{0.0, 0.0};
    }
}

} // namespace scalar

namespace {

enum class Backend { scalar_only, avx2 };

Backend resolve_backend() {
#if DSPR_HAVE_AVX2_BACKEND
    const char* forced = std::getenv("DSPR_KERNELS");
    if (forced != nullptr) {
        if (std::strcmp(forced, "scalar") == 0) return Backend::scalar_only;
        if (std::strcmp(forced, "avx2") == 0 && avx2_supported()) return Backend::avx2;
        if (std::strcmp(forced, "avx2") == 0) return Backend::scalar_only;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar_only;
#else
    return Backend::scalar_only;
#endif
}

Backend active() {
    static const Backend b = resolve_backend();
    return b;
}

} // namespace

bool avx2_supported() {
#if DSPR_HAVE_AVX2_BACKEND
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const char* backend_name() {
    return active() == Backend::scalar_only ? "scalar" : "avx2";
}

#if DSPR_HAVE_AVX2_BACKEND
#define DSPR_DISPATCH(fn, ...) \
    return active() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define DSPR_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double sum_sq_mag(const cplx* v, std::size_t n) { DSPR_DISPATCH(sum_sq_mag, v, n); }
double sum_mag(const cplx* v, std::size_t n) { DSPR_DISPATCH(sum_mag, v, n); }
cplx cdot(const cplx* a, const cplx* b, std::size_t n) { DSPR_DISPATCH(cdot, a, b, n); }
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) { DSPR_DISPATCH(caxpy, alpha, x, y, n); }
void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n) {
    DSPR_DISPATCH(soft_threshold, v, t, out, n);
}
void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n) {
    DSPR_DISPATCH(soft_threshold_weighted, v, t, out, n);
}

#undef DSPR_DISPATCH

} // namespace dspr::kernels
