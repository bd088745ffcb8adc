#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops shared by the whole library: complex dot
// products, magnitude sums, scaled accumulation, and soft-thresholding.
// Scalar reference implementations live in kernels::scalar; AVX2 variants
// (x86-64 only) in kernels::avx2. The unqualified entry points dispatch once
// per process based on CPU support, overridable with DSPR_KERNELS=scalar|avx2.
// The two backends are equivalence-tested against each other; results may
// differ by reassociation roundoff only.

namespace dspr::kernels {

using cplx = std::complex<double>;

namespace scalar {
double sum_sq_mag(const cplx* v, std::size_t n);
double sum_mag(const cplx* v, std::size_t n);
cplx cdot(const cplx* a, const cplx* b, std::size_t n); // sum_i conj(a_i) * b_i
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n);
void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define DSPR_HAVE_AVX2_BACKEND 1
namespace avx2 {
double sum_sq_mag(const cplx* v, std::size_t n);
double sum_mag(const cplx* v, std::size_t n);
cplx cdot(const cplx* a, const cplx* b, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n);
void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n);
} // namespace avx2
#endif

bool avx2_supported();
const char* backend_name(); // "avx2" or "scalar", resolved once per process

double sum_sq_mag(const cplx* v, std::size_t n);
double sum_mag(const cplx* v, std::size_t n);
cplx cdot(const cplx* a, const cplx* b, std::size_t n);
void caxpy(cplx alpha, const cplx* x, cplx* y, std::size_t n);
void soft_threshold(const cplx* v, double t, cplx* out, std::size_t n);
void soft_threshold_weighted(const cplx* v, const double* t, cplx* out, std::size_t n);

} // namespace dspr::kernels
