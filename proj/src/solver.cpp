#include "dspr/solver.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>

#include "dspr/core.hpp"
#include "dspr/drip.hpp"
#include "dspr/kernels.hpp"

namespace dspr {

const char* to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max_iters";
        case SolveStatus::failed: return "failed";
    }
    return "unknown";
}

double quartic_loss(const MeasurementEnsemble& ens, const RVec& y, const CVec& x) {
    if (x.size() != ens.dim() || y.size() != ens.count())
        throw InvalidParameter("quartic_loss: dimension mismatch");
    const auto n = static_cast<std::size_t>(ens.dim());
    double acc = 0.0;
    for (int i = 0; i < ens.count(); ++i) {
        const cplx z = kernels::cdot(ens.vectors.col(i).data(), x.data(), n);
        const double resid = z.real() * z.real() + z.imag() * z.imag() - y(i);
        acc += resid * resid;
    }
    return acc;
}

CVec quartic_gradient(const MeasurementEnsemble& ens, const RVec& y, const CVec& x) {
    if (x.size() != ens.dim() || y.size() != ens.count())
        throw InvalidParameter("quartic_gradient: dimension mismatch");
    const auto n = static_cast<std::size_t>(ens.dim());
    CVec grad = CVec::Zero(ens.dim());
    for (int i = 0; i < ens.count(); ++i) {
        const cplx z = kernels::cdot(ens.vectors.col(i).data(), x.data(), n);
        const double resid = z.real() * z.real() + z.imag() * z.imag() - y(i);
        kernels::caxpy(4.0 * resid * z, ens.vectors.col(i).data(), grad.data(), n);
    }
    return grad;
}

CVec spectral_init(const MeasurementEnsemble& ens, const RVec& y, const Dictionary& dict) {
    if (y.size() != ens.count()) throw InvalidParameter("spectral_init: dimension mismatch");
    (void)dict; // initialization works in signal space; the dictionary shapes later stages
    const int n = ens.dim();
    if (y.cwiseAbs().maxCoeff() <= 0.0) return CVec::Zero(n);

    CMat surrogate = CMat::Zero(n, n);
    for (int i = 0; i < ens.count(); ++i) {
        surrogate += y(i) * (ens.vectors.col(i) * ens.vectors.col(i).adjoint());
    }
    surrogate /= static_cast<double>(ens.count());
    const auto [lambda, v] = core::hermitian_top_eigenpair(core::hermitian_part(surrogate));

    CVec x = std::sqrt(std::max(lambda, 0.0)) * v;
    const double ensemble_energy =
        kernels::sum_sq_mag(ens.vectors.data(), static_cast<std::size_t>(ens.vectors.size()));
    const double target_sq = ensemble_energy > 0.0
                                 ? static_cast<double>(n) * y.sum() / ensemble_energy
                                 : 0.0;
    const double len = core::norm2(x);
    if (target_sq > 0.0 && len > 0.0) x *= std::sqrt(target_sq) / len;
    return x;
}

namespace {

struct PgdOptions {
    double q = 1.0; // 1 -> plain l1 path
};

// lq weights at the current coefficients: w_j = q (|c_j|^2 + d^2)^{(q-2)/2} |c_j|.
RVec lq_weights(const CVec& coeffs, double q, double delta) {
    RVec w(coeffs.size());
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        const double mag = std::abs(coeffs(j));
        w(j) = q * std::pow(mag * mag + delta * delta, (q - 2.0) / 2.0) * mag;
    }
    return w;
}

double weighted_l1(const CVec& coeffs, const RVec& w) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) acc += w(j) * std::abs(coeffs(j));
    return acc;
}

// Smoothed lq penalty sum_j (|c_j|^2 + d^2)^{q/2}; the reweighted step is its
// majorize-minimize linearization, so this is the quantity that must not
// increase at fixed delta.
double smoothed_lq(const CVec& coeffs, double q, double delta) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        acc += std::pow(std::norm(coeffs(j)) + delta * delta, q / 2.0);
    }
    return acc;
}

// Deterministic standalone phase convention: largest-magnitude analysis
// coefficient made real positive (ties: lowest index).
CVec canonical_phase(const Dictionary& dict, const CVec& x) {
    const CVec coeffs = analysis(dict, x);
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index j = 0; j < coeffs.size(); ++j) {
        if (std::abs(coeffs(j)) > best_mag + kZeroTol) {
            best_mag = std::abs(coeffs(j));
            best = j;
        }
    }
    if (best_mag <= kZeroTol) return x;
    return x * (std::conj(coeffs(best)) / std::abs(coeffs(best)));
}

SolveResult run_proximal_descent(const ProblemInstance& inst, const SolverConfig& config,
                                 const PgdOptions& opt) {
    const auto t_start = std::chrono::steady_clock::now();
    if (config.max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
    if (!(config.tol_rel_change > 0.0)) throw InvalidParameter("tol_rel_change must be positive");
    if (config.lambda < 0.0) throw InvalidParameter("lambda must be nonnegative");

    const RVec& y = inst.record.y;
    const MeasurementEnsemble& ens = inst.ensemble;
    const Dictionary& dict = inst.dict;

    SolveResult result;
    result.xhat = spectral_init(ens, y, dict);
    if (core::norm2(result.xhat) <= kZeroTol) {
        // Zero data (or an all-nonpositive spectrum): zero is the natural point.
        result.status = y.cwiseAbs().maxCoeff() <= 0.0 ? SolveStatus::converged : SolveStatus::failed;
        result.residual = std::sqrt(quartic_loss(ens, y, result.xhat));
        result.runtime_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t_start)
                                .count();
        return result;
    }

    // Lambda annealing: decade steps from a data-driven start down to the
    // configured final weight, then a lambda = 0 polish stage that refines
    // pure measurement consistency inside the basin the penalty selected.
    // The lq path holds lambda at its final value for several extra stages
    // while the smoothing delta anneals.
    struct Stage {
        double lambda;
        double delta;
    };
    std::vector<Stage> stages;
    {
        const double lam_final = config.lambda;
        std::size_t idx = 0;
        const auto delta_at = [&](std::size_t i) {
            return opt.q < 1.0 ? std::max(config.smoothing_delta0 *
                                              std::pow(config.smoothing_decay,
                                                       static_cast<double>(i)),
                                          1e-10)
                               : 0.0;
        };
        double lam = std::max(lam_final, 0.05 * y.cwiseAbs().maxCoeff());
        while (lam > lam_final * 1.0001 && stages.size() < 16) {
            stages.push_back({lam, delta_at(idx++)});
            lam *= 0.1;
        }
        stages.push_back({lam_final, delta_at(idx++)});
        if (opt.q < 1.0) {
            for (int extra = 0; extra < 8; ++extra) stages.push_back({lam_final, delta_at(idx++)});
        }
        stages.push_back({0.0, delta_at(idx)});
    }
    const std::size_t total_stages = stages.size();

    CVec x = result.xhat;
    const bool backtracking = config.step_size <= 0.0;
    double step = backtracking ? 1.0 : config.step_size;
    const double f_init = quartic_loss(ens, y, x) + 1.0;
    int used_iters = 0;
    bool diverged = false;
    bool final_stage_converged = false;

    for (std::size_t stage = 0; stage < total_stages && !diverged; ++stage) {
        const double lam = stages[stage].lambda;
        const double delta = stages[stage].delta;
        const bool final_stage = stage + 1 == total_stages;
        const int stage_budget =
            final_stage ? config.max_iters - used_iters
                        : std::max(1, config.max_iters / static_cast<int>(total_stages));
        step = backtracking ? 1.0 : config.step_size; // re-adapt to the new stage objective

        for (int it = 0; it < stage_budget && used_iters < config.max_iters; ++it) {
            CVec coeffs = analysis(dict, x);
            RVec weights;
            double f_cur = quartic_loss(ens, y, x);
            if (opt.q < 1.0) {
                weights = lq_weights(coeffs, opt.q, delta);
                f_cur += lam * weighted_l1(coeffs, weights);
            } else {
                f_cur += lam * core::norm1(coeffs);
            }

            const CVec grad = quartic_gradient(ens, y, x);

            CVec x_new;
            double f_new = f_cur;
            bool accepted = false;
            double trial = step;
            for (int bt = 0; bt < 60; ++bt) {
                const CVec shifted = x - trial * grad;
                CVec shifted_coeffs = analysis(dict, shifted);
                CVec thresholded(shifted_coeffs.size());
                if (opt.q < 1.0) {
                    RVec th = (trial * lam) * weights;
                    kernels::soft_threshold_weighted(shifted_coeffs.data(), th.data(),
                                                     thresholded.data(),
                                                     static_cast<std::size_t>(th.size()));
                } else {
                    kernels::soft_threshold(shifted_coeffs.data(), trial * lam, thresholded.data(),
                                            static_cast<std::size_t>(shifted_coeffs.size()));
                }
                CVec candidate = synthesize(dict, thresholded);
                double f_cand = quartic_loss(ens, y, candidate);
                if (opt.q < 1.0) {
                    f_cand += lam * weighted_l1(analysis(dict, candidate), weights);
                } else {
                    f_cand += lam * core::norm1(analysis(dict, candidate));
                }
                // Sufficient decrease against the actual movement (the
                // proximal form of the Armijo rule).
                const double moved_sq = (candidate - x).squaredNorm();
                if (f_cand <= f_cur - 1e-4 / trial * moved_sq) {
                    x_new = std::move(candidate);
                    f_new = f_cand;
                    accepted = true;
                    break;
                }
                if (!backtracking) break; // fixed step: give up on this stage
                trial *= 0.5;
                if (trial < 1e-18) break;
            }
            ++used_iters;
            if (!accepted) {
                // No admissible step: the stage has converged to working precision.
                if (final_stage) final_stage_converged = true;
                break;
            }
            step = backtracking ? std::min(trial * 1.25, 1e6) : step;

            const double rel_change = (x_new - x).norm() / std::max(1.0, x.norm());
            x = std::move(x_new);
            if (opt.q < 1.0) {
                result.objective_trace.push_back(quartic_loss(ens, y, x) +
                                                 lam * smoothed_lq(analysis(dict, x), opt.q, delta));
            } else {
                result.objective_trace.push_back(f_new);
            }
            if (!std::isfinite(f_new) || f_new > 1e6 * f_init) {
                diverged = true;
                break;
            }
            if (rel_change < config.tol_rel_change) {
                if (final_stage) final_stage_converged = true;
                break;
            }
        }
    }

    result.xhat = canonical_phase(dict, x);
    result.iterations = used_iters;
    result.residual = std::sqrt(quartic_loss(ens, y, result.xhat));
    if (diverged || !core::all_finite(result.xhat)) {
        result.status = SolveStatus::failed;
    } else if (final_stage_converged) {
        result.status = SolveStatus::converged;
    } else {
        result.status = SolveStatus::max_iters;
    }
    result.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

} // namespace

SolveResult solve_l1_analysis(const ProblemInstance& instance, const SolverConfig& config) {
    PgdOptions opt;
    opt.q = 1.0;
    return run_proximal_descent(instance, config, opt);
}

SolveResult solve_lq_analysis(const ProblemInstance& instance, const SolverConfig& config) {
    if (!(config.q > 0.0) || config.q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    PgdOptions opt;
    opt.q = config.q;
    // q = 1 reduces exactly to the l1 path (weights are identically one).
    return run_proximal_descent(instance, config, opt);
}

namespace {

// Gradient descent polish on the smooth quartic loss alone.
int polish_candidate(const MeasurementEnsemble& ens, const RVec& y, CVec& x, int max_iters) {
    double step = 1.0;
    double f_cur = quartic_loss(ens, y, x);
    int used = 0;
    for (int it = 0; it < max_iters; ++it) {
        const CVec grad = quartic_gradient(ens, y, x);
        const double grad_sq = core::norm2_sq(grad);
        if (grad_sq <= 1e-30) break;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            const CVec cand = x - step * grad;
            const double f_cand = quartic_loss(ens, y, cand);
            if (f_cand <= f_cur - 1e-4 * step * grad_sq) {
                x = cand;
                const bool tiny = (f_cur - f_cand) <= 1e-15 * std::max(1.0, f_cur);
                f_cur = f_cand;
                accepted = true;
                ++used;
                step = std::min(step * 1.25, 1e6);
                if (tiny) return used;
                break;
            }
            step *= 0.5;
            if (step < 1e-18) return used;
        }
        if (!accepted) break;
    }
    return used;
}

} // namespace

SolveResult oracle_support_solver(const ProblemInstance& instance, int k_max) {
    const auto t_start = std::chrono::steady_clock::now();
    const int N = instance.dict.atoms();
    const int m = instance.ensemble.count();
    if (k_max < 1 || k_max > N) throw InvalidParameter("oracle: k_max must lie in [1, N]");
    if (binomial_capped(N, k_max, 10000) > 10000)
        throw InvalidParameter("oracle: support enumeration cap C(N, k) <= 10^4 exceeded");

    const RVec& y = instance.record.y;
    SolveResult result;
    result.xhat = CVec::Zero(instance.dict.dim());
    result.residual = y.norm();
    result.status = SolveStatus::failed;

    if (y.cwiseAbs().maxCoeff() <= 0.0) {
        result.status = SolveStatus::converged;
        result.runtime_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - t_start)
                                .count();
        return result;
    }

    const double noise_level = instance.record.epsilon + 1e-8;
    const int kk = k_max * k_max; // real degrees of freedom of a Hermitian k x k matrix
    bool any_candidate = false;

    for (const auto& raw_support : enumerate_supports(N, k_max)) {
        // b_i = (D_T)^* a_i
        CMat sub(instance.dict.dim(), k_max);
        for (int t = 0; t < k_max; ++t)
            sub.col(t) = instance.dict.matrix.col(raw_support[static_cast<std::size_t>(t)]);
        const CMat b = sub.adjoint() * instance.ensemble.vectors; // k x m

        // Linear least squares over Hermitian W: real parameterization with
        // columns [diag | Re offdiag | Im offdiag].
        RMat design(m, kk);
        for (int i = 0; i < m; ++i) {
            int col = 0;
            for (int j = 0; j < k_max; ++j) design(i, col++) = std::norm(b(j, i));
            for (int j = 0; j < k_max; ++j) {
                for (int l = j + 1; l < k_max; ++l) {
                    const cplx cross = std::conj(b(j, i)) * b(l, i);
                    design(i, col++) = 2.0 * cross.real();
                    design(i, col++) = -2.0 * cross.imag();
                }
            }
        }
        const RVec theta = (design.transpose() * design).ldlt().solve(design.transpose() * y);
        if (!theta.allFinite()) continue;

        CMat w(k_max, k_max);
        {
            int col = 0;
            for (int j = 0; j < k_max; ++j) w(j, j) = theta(col++);
            for (int j = 0; j < k_max; ++j) {
                for (int l = j + 1; l < k_max; ++l) {
                    const double re = theta(col++);
                    const double im = theta(col++);
                    w(j, l) = cplx{re, im};
                    w(l, j) = cplx{re, -im};
                }
            }
        }

        Eigen::SelfAdjointEigenSolver<CMat> es(w);
        if (es.info() != Eigen::Success) continue;
        const RVec evals = es.eigenvalues();
        const double lead = evals(k_max - 1); // largest algebraic
        if (!(lead > 0.0)) continue;
        double second = 0.0;
        for (int j = 0; j < k_max - 1; ++j) second = std::max(second, std::abs(evals(j)));

        CVec candidate = sub * (std::sqrt(lead) * es.eigenvectors().col(k_max - 1));
        result.iterations += polish_candidate(instance.ensemble, y, candidate, 400);
        const double resid = std::sqrt(quartic_loss(instance.ensemble, y, candidate));

        // Lenient rank-one gate: a blurred spectrum only disqualifies the
        // support if polishing could not reach the noise floor either.
        if (second > 0.1 * lead && resid > noise_level) continue;

        any_candidate = true;
        if (resid < result.residual) {
            result.residual = resid;
            result.xhat = candidate;
        }
    }

    if (any_candidate) {
        result.xhat = canonical_phase(instance.dict, result.xhat);
        result.residual = std::sqrt(quartic_loss(instance.ensemble, y, result.xhat));
        result.status = SolveStatus::converged;
    }
    result.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
            .count();
    return result;
}

std::string solve_result_json(const SolveResult& result, const CVec* x0, bool include_runtime) {
    nlohmann::ordered_json j;
    j["status"] = to_string(result.status);
    j["iterations"] = result.iterations;
    j["residual"] = result.residual;
    if (x0 != nullptr) {
        j["error_lifted"] = lifted_distance(result.xhat, *x0);
        j["error_phase_aligned"] = phase_aligned_distance(result.xhat, *x0);
    } else {
        j["error_lifted"] = nullptr;
        j["error_phase_aligned"] = nullptr;
    }
    if (include_runtime) {
        j["runtime_ms"] = result.runtime_ms;
    } else {
        j["runtime_ms"] = nullptr;
    }
    return j.dump(2) + "\n";
}

} // namespace dspr
