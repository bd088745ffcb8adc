#pragma once

#include <utility>

#include "dspr/types.hpp"

namespace dspr::core {

bool all_finite(const CVec& v);
bool all_finite(const CMat& X);

// Largest componentwise deviation from X = X^*.
double hermitian_deviation(const CMat& X);

// Throws InvalidParameter unless X is square and Hermitian within tol.
void require_hermitian(const CMat& X, double tol = 1e-12);

// Symmetrized copy (X + X^*)/2; cleans up arithmetic drift.
CMat hermitian_part(const CMat& X);

// Vector helpers routed through the kernel layer.
double norm2(const CVec& v);
double norm1(const CVec& v);
double norm2_sq(const CVec& v);
double lq_pow_sum(const CVec& v, double q); // sum_j |v_j|^q, q in (0,1]
cplx inner(const CVec& u, const CVec& v);   // sum_j conj(u_j) v_j

double frobenius_norm(const CMat& X);

// sum_{jk} |X_jk|^q; at q = 1 this is the entrywise l1 norm.
double entrywise_lq_norm(const CMat& X, double q);

// Number of rows with any entry of magnitude > kZeroTol.
int row_sparsity(const CMat& X);

// Eigenvalues of magnitude above tol; tol <= 0 selects 1e-9 * spectral radius.
int numerical_rank(const CMat& X, double tol = 0.0);

// Eigenpair of the largest-magnitude eigenvalue; vector is unit norm.
std::pair<double, CVec> hermitian_top_eigenpair(const CMat& X);

// All eigenvalues, ascending (Hermitian input).
RVec hermitian_eigenvalues(const CMat& X);

} // namespace dspr::core
