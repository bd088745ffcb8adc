#include "dspr/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "dspr/kernels.hpp"

namespace dspr::core {

bool all_finite(const CVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
    }
    return true;
}

bool all_finite(const CMat& X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (!std::isfinite(X(i, j).real()) || !std::isfinite(X(i, j).imag())) return false;
        }
    }
    return true;
}

double hermitian_deviation(const CMat& X) {
    if (X.rows() != X.cols()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            worst = std::max(worst, std::abs(X(i, j) - std::conj(X(j, i))));
        }
    }
    return worst;
}

void require_hermitian(const CMat& X, double tol) {
    if (X.rows() != X.cols()) throw InvalidParameter("matrix must be square");
    if (hermitian_deviation(X) > tol) throw InvalidParameter("matrix is not Hermitian within tolerance");
}

CMat hermitian_part(const CMat& X) { return 0.5 * (X + X.adjoint()); }

double norm2_sq(const CVec& v) {
    return kernels::sum_sq_mag(v.data(), static_cast<std::size_t>(v.size()));
}

double norm2(const CVec& v) { return std::sqrt(norm2_sq(v)); }

double norm1(const CVec& v) {
    return kernels::sum_mag(v.data(), static_cast<std::size_t>(v.size()));
}

double lq_pow_sum(const CVec& v, double q) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    if (q == 1.0) return norm1(v);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > 0.0) acc += std::pow(mag, q);
    }
    return acc;
}

cplx inner(const CVec& u, const CVec& v) {
    if (u.size() != v.size()) throw InvalidParameter("inner: dimension mismatch");
    return kernels::cdot(u.data(), v.data(), static_cast<std::size_t>(u.size()));
}

double frobenius_norm(const CMat& X) {
    return std::sqrt(kernels::sum_sq_mag(X.data(), static_cast<std::size_t>(X.size())));
}

double entrywise_lq_norm(const CMat& X, double q) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    if (q == 1.0) return kernels::sum_mag(X.data(), static_cast<std::size_t>(X.size()));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double mag = std::abs(X(i, j));
            if (mag > 0.0) acc += std::pow(mag, q);
        }
    }
    return acc;
}

int row_sparsity(const CMat& X) {
    int count = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (std::abs(X(i, j)) > kZeroTol) {
                ++count;
                break;
            }
        }
    }
    return count;
}

namespace {

Eigen::SelfAdjointEigenSolver<CMat> solve_hermitian(const CMat& X, bool vectors) {
    Eigen::SelfAdjointEigenSolver<CMat> es;
    es.compute(X, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericFailure("Hermitian eigensolver did not converge");
    return es;
}

} // namespace

RVec hermitian_eigenvalues(const CMat& X) {
    require_hermitian(X, 1e-10);
    return solve_hermitian(X, false).eigenvalues();
}

int numerical_rank(const CMat& X, double tol) {
    require_hermitian(X, 1e-10);
    const RVec evals = solve_hermitian(X, false).eigenvalues();
    double radius = 0.0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) radius = std::max(radius, std::abs(evals(i)));
    const double cut = tol > 0.0 ? tol : 1e-9 * radius;
    int rank = 0;
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (std::abs(evals(i)) > cut) ++rank;
    }
    return rank;
}

std::pair<double, CVec> hermitian_top_eigenpair(const CMat& X) {
    require_hermitian(X, 1e-10);
    const auto es = solve_hermitian(X, true);
    const RVec evals = es.eigenvalues(); // ascending
    const Eigen::Index last = evals.size() - 1;
    const Eigen::Index top = std::abs(evals(0)) > std::abs(evals(last)) ? 0 : last;
    const double lambda = evals(top);
    CVec v = es.eigenvectors().col(top);
    v /= norm2(v);
    const double resid = (X * v - lambda * v).norm();
    if (resid > 1e-8 * std::max(1e-300, frobenius_norm(X)) && frobenius_norm(X) > 0.0)
        throw NumericFailure("top eigenpair residual exceeds tolerance");
    return {lambda, v};
}

} // namespace dspr::core
