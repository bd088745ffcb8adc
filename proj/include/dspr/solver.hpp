#pragma once

#include <string>
#include <vector>

#include "dspr/instance.hpp"

namespace dspr {

struct SolverConfig {
    double lambda = 1e-6;         // final analysis-l1 weight; annealed down to this
    int max_iters = 5000;         // global iteration budget
    double step_size = 0.0;       // <= 0 selects backtracking
    double tol_rel_change = 1e-9;
    double q = 1.0;               // exponent for the lq path
    double smoothing_delta0 = 1.0;
    double smoothing_decay = 0.5;
    std::uint64_t seed = 0;
};

enum class SolveStatus { converged, max_iters, failed };

const char* to_string(SolveStatus status);

struct SolveResult {
    CVec xhat;
    int iterations = 0;
    std::vector<double> objective_trace; // value after each accepted step
    double residual = 0.0;               // || A(xhat xhat*) - y ||_2
    SolveStatus status = SolveStatus::failed;
    double runtime_ms = 0.0;
};

// Smooth data-fit term sum_i (|<a_i, x>|^2 - y_i)^2 and its gradient in the
// convention grad_j = d f / d Re(x_j) + i d f / d Im(x_j), i.e.
// 4 sum_i (|a_i^* x|^2 - y_i) a_i a_i^* x.
double quartic_loss(const MeasurementEnsemble& ens, const RVec& y, const CVec& x);
CVec quartic_gradient(const MeasurementEnsemble& ens, const RVec& y, const CVec& x);

// Top eigenvector of (1/m) sum_i y_i a_i a_i^*, rescaled to the standard
// norm estimate n sum(y) / sum ||a_i||^2. Returns zero when y vanishes.
CVec spectral_init(const MeasurementEnsemble& ens, const RVec& y, const Dictionary& dict);

// Proximal descent on ||A(x x*) - y||_2^2 + lambda ||D* x||_1 with lambda
// annealing and backtracking. The prox is exact for unitary D and a
// synthesis-side surrogate otherwise.
SolveResult solve_l1_analysis(const ProblemInstance& instance, const SolverConfig& config);

// Iteratively reweighted variant for the lq penalty; at q = 1 it runs the
// exact l1 path.
SolveResult solve_lq_analysis(const ProblemInstance& instance, const SolverConfig& config);

// Exhaustive support enumeration: per support, exact Hermitian least squares
// in the lifted domain, rank-one extraction, then gradient-descent polish.
// Requires C(N, k_max) <= 10^4.
SolveResult oracle_support_solver(const ProblemInstance& instance, int k_max);

// {status, iterations, residual, error_lifted, error_phase_aligned,
// runtime_ms}; errors are null without ground truth, runtime_ms is null
// unless include_runtime (it is not deterministic).
std::string solve_result_json(const SolveResult& result, const CVec* x0, bool include_runtime);

} // namespace dspr
