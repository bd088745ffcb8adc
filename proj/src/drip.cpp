#include "dspr/drip.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <limits>

#include "dspr/core.hpp"

namespace dspr {

CMat sample_test_matrix_on_support(int N, int s, const IndexSet& support, Rng& rng,
                                   const std::vector<int>* forced_signs) {
    if (s < 1) throw InvalidParameter("rank bound s must be >= 1");
    if (support.empty() || support.indices().back() >= N)
        throw InvalidParameter("support out of range");
    CMat Z = CMat::Zero(N, N);
    for (int j = 0; j < s; ++j) {
        CVec g = CVec::Zero(N);
        for (int idx : support.indices()) g(idx) = rng.cnormal();
        const double len = core::norm2(g);
        if (len <= kZeroTol) {
            --j; // measure-zero degenerate draw
            continue;
        }
        g /= len;
        double sign;
        if (forced_signs != nullptr) {
            sign = (*forced_signs)[static_cast<std::size_t>(j)] >= 0 ? 1.0 : -1.0;
        } else {
            sign = rng.below(2) == 0 ? 1.0 : -1.0;
        }
        Z += sign * (g * g.adjoint());
    }
    return Z;
}

CMat sample_test_matrix(int N, int s, int k, std::uint64_t seed) {
    if (k < 1 || k > N) throw InvalidParameter("row-sparsity bound k must lie in [1, N]");
    Rng rng(seed);
    const IndexSet support = IndexSet::of(rng.subset(N, k), N);
    return sample_test_matrix_on_support(N, s, support, rng);
}

namespace {

double conjugated_fro(const Dictionary& dict, const CMat& Z, CMat& out) {
    if (Z.rows() != dict.atoms() || Z.cols() != dict.atoms())
        throw InvalidParameter("test matrix must be N x N");
    out = dict.matrix * Z * dict.matrix.adjoint();
    return core::frobenius_norm(out);
}

double abs_sum(const RVec& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::abs(v(i));
    return acc;
}

double abs_pow_sum(const RVec& v, double q) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > 0.0) acc += std::pow(mag, q);
    }
    return acc;
}

} // namespace

double drip_ratio(const Dictionary& dict, const MeasurementEnsemble& ens, const CMat& Z, double q) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    CMat lifted;
    const double fro = conjugated_fro(dict, Z, lifted);
    if (fro <= kZeroTol * std::max(1.0, core::frobenius_norm(Z)))
        throw DegenerateInput("D Z D* vanishes");
    const RVec measured = apply_lifted(ens, lifted);
    if (q == 1.0) return abs_sum(measured) / (static_cast<double>(ens.count()) * fro);
    return abs_pow_sum(measured, q) / std::pow(fro, q);
}

double drip_ratio_lq(const Dictionary& dict, const MeasurementEnsemble& ens, const CMat& Z,
                     double q) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    CMat lifted;
    const double fro = conjugated_fro(dict, Z, lifted);
    if (fro <= kZeroTol * std::max(1.0, core::frobenius_norm(Z)))
        throw DegenerateInput("D Z D* vanishes");
    const RVec measured = apply_lifted(ens, lifted);
    return abs_pow_sum(measured, q) / std::pow(fro, q);
}

double rip_ratio(const MeasurementEnsemble& ens, const CMat& X) {
    const double fro = core::frobenius_norm(X);
    if (fro <= kZeroTol) throw DegenerateInput("zero test matrix");
    const RVec measured = apply_lifted(ens, X);
    return abs_sum(measured) / (static_cast<double>(ens.count()) * fro);
}

long long binomial_capped(int n, int k, long long cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    long double acc = 1.0L;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<long double>(n - k + i) / static_cast<long double>(i);
        if (acc > static_cast<long double>(cap)) return cap + 1;
    }
    return static_cast<long long>(acc + 0.5L);
}

std::vector<std::vector<int>> enumerate_supports(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
    while (true) {
        out.push_back(cur);
        int pos = k - 1;
        while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
        if (pos < 0) break;
        ++cur[static_cast<std::size_t>(pos)];
        for (int j = pos + 1; j < k; ++j)
            cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

DripEstimate estimate_drip(const Dictionary& dict, const MeasurementEnsemble& ens,
                           const DripQuery& query, std::uint64_t seed,
                           const std::vector<CMat>& extra_candidates,
                           std::vector<double>* ratios_out) {
    if (query.s < 1) throw InvalidParameter("query.s must be >= 1");
    if (query.k < 1 || query.k > dict.atoms()) throw InvalidParameter("query.k must lie in [1, N]");
    if (!(query.q > 0.0) || query.q > 1.0) throw InvalidParameter("query.q must lie in (0, 1]");
    if (query.num_samples < 1) throw InvalidParameter("query.num_samples must be >= 1");

    DripEstimate est;
    est.lower = std::numeric_limits<double>::infinity();
    est.upper = -std::numeric_limits<double>::infinity();

    const auto consider = [&](const CMat& Z) {
        double ratio;
        try {
            ratio = drip_ratio(dict, ens, Z, query.q);
        } catch (const DegenerateInput&) {
            return; // skipped, not counted
        }
        ++est.samples_used;
        if (ratios_out != nullptr) ratios_out->push_back(ratio);
        if (ratio < est.lower) {
            est.lower = ratio;
            est.lower_witness = Z;
        }
        if (ratio > est.upper) {
            est.upper = ratio;
            est.upper_witness = Z;
        }
    };

    const long long kEnumerationCap = 10000;
    const long long count = binomial_capped(dict.atoms(), query.k, kEnumerationCap);
    if (query.enumerate_supports && count <= kEnumerationCap) {
        const auto supports = enumerate_supports(dict.atoms(), query.k);
        const long per_support = std::max<long>(
            1, static_cast<long>((query.num_samples + count - 1) / count));
        std::uint64_t draw = 0;
        for (const auto& sup : supports) {
            const IndexSet support = IndexSet::of(sup, dict.atoms());
            for (long t = 0; t < per_support; ++t, ++draw) {
                Rng rng(derive_seed(seed, draw));
                consider(sample_test_matrix_on_support(dict.atoms(), query.s, support, rng));
            }
        }
    } else {
        for (int t = 0; t < query.num_samples; ++t) {
            consider(sample_test_matrix(dict.atoms(), query.s, query.k,
                                        derive_seed(seed, static_cast<std::uint64_t>(t))));
        }
    }
    for (const auto& Z : extra_candidates) consider(Z);

    if (est.samples_used == 0) throw DegenerateInput("all DRIP samples were degenerate");
    return est;
}

ConditionResult l1_recovery_condition(double alpha, double beta, double r) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(r > 0.0))
        throw InvalidParameter("l1 condition requires alpha, beta, r > 0");
    const double margin = alpha - 4.0 * beta / std::sqrt(r) - beta / r;
    return {margin > 0.0, margin};
}

double l1_stability_constant(double alpha, double beta, double r) {
    const auto cond = l1_recovery_condition(alpha, beta, r);
    if (!cond.holds)
        throw PreconditionViolation("stability constant undefined: recovery condition fails");
    return (1.0 / r + 4.0 / std::sqrt(r) + 1.0) / cond.margin;
}

ConditionResult lq_recovery_condition(double phi, double psi, double r, double q) {
    if (!(phi > 0.0) || !(psi > 0.0)) throw InvalidParameter("lq condition requires phi, psi > 0");
    if (!(r > 1.0)) throw InvalidParameter("lq condition requires r > 1");
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    const double threshold = psi * (std::pow(r, q - 2.0) + std::pow(2.0, 2.0 + q / 2.0) * std::pow(r, q / 2.0 - 1.0));
    const double margin = phi - threshold;
    return {margin > 0.0, margin};
}

ErrorBounds theoretical_error_bound(double C, double epsilon, int m) {
    if (!(C > 0.0)) throw InvalidParameter("stability constant must be positive");
    if (epsilon < 0.0) throw InvalidParameter("epsilon must be nonnegative");
    if (m < 1) throw InvalidParameter("m must be >= 1");
    const double lifted = 2.0 * C * epsilon / std::sqrt(static_cast<double>(m));
    return {lifted, lifted * std::sqrt(2.0)};
}

std::string drip_report_json(const Dictionary& dict, const MeasurementEnsemble& ens,
                             const DripQuery& query, const DripEstimate& estimate,
                             const std::vector<double>& ratios, double condition_r,
                             double band_lo, double band_hi) {
    nlohmann::ordered_json j;
    j["q"] = query.q;
    j["s"] = query.s;
    j["k"] = query.k;
    j["m"] = ens.count();
    j["n"] = dict.dim();
    j["N"] = dict.atoms();
    j["samples"] = estimate.samples_used;
    j["lower"] = estimate.lower;
    j["upper"] = estimate.upper;
    j["condition_r"] = condition_r;
    if (query.q == 1.0) {
        const double margin =
            estimate.lower - 4.0 * estimate.upper / std::sqrt(condition_r) - estimate.upper / condition_r;
        const bool holds = margin > 0.0 && estimate.lower > 0.0;
        j["condition_holds"] = holds;
        j["margin"] = margin;
        if (holds) {
            j["C"] = l1_stability_constant(estimate.lower, estimate.upper, condition_r);
        } else {
            j["C"] = nullptr;
        }
    } else if (condition_r > 1.0) {
        const double threshold = estimate.upper * (std::pow(condition_r, query.q - 2.0) +
                                                   std::pow(2.0, 2.0 + query.q / 2.0) *
                                                       std::pow(condition_r, query.q / 2.0 - 1.0));
        const double margin = estimate.lower - threshold;
        j["condition_holds"] = margin > 0.0 && estimate.lower > 0.0;
        j["margin"] = margin;
        j["C"] = nullptr; // the stability constant belongs to the l1 theorem
    } else {
        j["condition_holds"] = false;
        j["margin"] = nullptr; // lq condition needs r > 1
        j["C"] = nullptr;
    }
    j["band_lo"] = band_lo;
    j["band_hi"] = band_hi;
    long in_band = 0;
    for (double ratio : ratios) {
        if (ratio >= band_lo && ratio <= band_hi) ++in_band;
    }
    j["band_fraction"] = ratios.empty() ? 0.0 : static_cast<double>(in_band) / static_cast<double>(ratios.size());
    return j.dump(2) + "\n";
}

} // namespace dspr
