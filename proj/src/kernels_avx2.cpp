// AVX2 + FMA variants of the complex inner-loop kernels. Compiled with
// -mavx2 -mfma on x86-64 only; callers must gate on avx2_supported().
// Complex data is processed in interleaved (re, im) layout: one __m256d
// holds two complex doubles.

#include "dspr/kernels.hpp"

#if DSPR_HAVE_AVX2_BACKEND

#include <immintrin.h>

#include <cmath>

namespace dspr::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// [a, b, c, d] -> [b, a, d, c]
inline __m256d swap_pairs(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

} // namespace

double sum_sq_mag(const cplx* v, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(v);
    const std::size_t nd = 2 * n;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= nd; i += 8) {
        const __m256d x0 = _mm256_loadu_pd(p + i);
        const __m256d x1 = _mm256_loadu_pd(p + i + 4);
        acc0 = _mm256_fmadd_pd(x0, x0, acc0);
        acc1 = _mm256_fmadd_pd(x1, x1, acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < nd; ++i) acc += p[i] * p[i];
    return acc;
}

double sum_mag(const cplx* v, std::size_t n) {
    const double* p = reinterpret_cast<const double*>(v);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(p + 2 * i);
        const __m256d x1 = _mm256_loadu_pd(p + 2 * i + 4);
        // hadd of the squared halves yields the four |.|^2 values (permuted).
        const __m256d sq = _mm256_hadd_pd(_mm256_mul_pd(x0, x0), _mm256_mul_pd(x1, x1));
        acc = _mm256_add_pd(acc, _mm256_sqrt_pd(sq));
    }
    double out = hsum(acc);
    for (; i < n; ++i) {
        out += std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
    }
    return out;
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const __m256d conj_mask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        // re: ar*br + ai*bi is a plain dot product of the raw lanes.
        acc_re = _mm256_fmadd_pd(va, vb, acc_re);
        // im: ar*bi - ai*br = dot(conj(a) lanes, swapped b lanes).
        const __m256d va_conj = _mm256_xor_pd(va, conj_mask);
        acc_im = _mm256_fmadd_pd(va_conj, swap_pairs(vb), acc_im);
    }
    double re = hsum(acc_re);
    double im = hsum(acc_im);
    for (; i < n; ++i) {
        re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
        im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
    }
    return {re, im};
}

void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* py = reinterpret_cast<double*>(y);
    const __m256d ar = _mm256_set1_pd(alpha.real());
    const __m256d ai = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        const __m256d vy = _mm256_loadu_pd(py + 2 * i);
        // even lanes ar*xr - ai*xi, odd lanes ar*xi + ai*xr
        const __m256d prod = _mm256_fmaddsub_pd(ar, vx, _mm256_mul_pd(ai, swap_pairs(vx)));
        _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(vy, prod));
    }
    const double a_r = alpha.real(), a_i = alpha.imag();
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] += cplx{a_r * xr - a_i * xi, a_r * xi + a_i * xr};
    }
}

namespace {

inline void soft_threshold_block(__m256d v, __m256d tv, double* out) {
    const __m256d sq = _mm256_mul_pd(v, v);
    const __m256d mag2 = _mm256_add_pd(sq, _mm256_permute_pd(sq, 0b0101)); // |.|^2 per lane pair
    const __m256d mag = _mm256_sqrt_pd(mag2);
    const __m256d keep = _mm256_cmp_pd(mag, tv, _CMP_GT_OQ);
    const __m256d scale = _mm256_div_pd(_mm256_sub_pd(mag, tv), mag); // NaN lanes blended away
    const __m256d scaled = _mm256_mul_pd(v, scale);
    _mm256_storeu_pd(out, _mm256_and_pd(scaled, keep));
}

} // namespace

void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n) {
    const double* pv = reinterpret_cast<const double*>(v);
    double* po = reinterpret_cast<double*>(out);
    const __m256d tv = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        soft_threshold_block(_mm256_loadu_pd(pv + 2 * i), tv, po + 2 * i);
    }
    for (; i < n; ++i) {
        const double mag = std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
        out[i] = mag > t ? v[i] * ((mag - t) / mag) : cplx{0.0, 0.0};
    }
}

void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n) {
    const double* pv = reinterpret_cast<const double*>(v);
    double* po = reinterpret_cast<double*>(out);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d tv = _mm256_setr_pd(t[i], t[i], t[i + 1], t[i + 1]);
        soft_threshold_block(_mm256_loadu_pd(pv + 2 * i), tv, po + 2 * i);
    }
    for (; i < n; ++i) {
        const double mag = std::sqrt(v[i].real() * v[i].real() + v[i].imag() * v[i].imag());
        out[i] = mag > t[i] ? v[i] * ((mag - t[i]) / mag) : cplx{0.0, 0.0};
    }
}

} // namespace dspr::kernels::avx2

#endif // DSPR_HAVE_AVX2_BACKEND
