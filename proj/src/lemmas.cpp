#include "dspr/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dspr/core.hpp"
#include "dspr/serialize.hpp"

namespace dspr {

namespace {

constexpr double kFeasSlack = 1e-12;

double l1_of(const RVec& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::abs(v(i));
    return acc;
}

double linf_of(const RVec& v) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc = std::max(acc, std::abs(v(i)));
    return acc;
}

// Indices of w sorted by descending value, ties ascending by index.
std::vector<int> descending_order(const RVec& w) {
    std::vector<int> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return w(a) > w(b); });
    return order;
}

} // namespace

Decomposition sparse_convex_decompose(const RVec& v, int k, double mu) {
    const auto n = v.size();
    if (k < 1) throw InvalidParameter("decomposition requires k >= 1");
    if (!(mu > 0.0)) throw InvalidParameter("decomposition requires mu > 0");

    RVec mags(n), signs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        mags(i) = std::abs(v(i));
        signs(i) = v(i) < 0.0 ? -1.0 : 1.0;
    }
    const double mass = l1_of(mags);
    if (mass > static_cast<double>(k) * mu + kFeasSlack)
        throw InvalidParameter("decomposition requires ||v||_1 <= k mu");
    if (linf_of(mags) > mu + kFeasSlack)
        throw InvalidParameter("decomposition requires ||v||_inf <= mu");
    for (Eigen::Index i = 0; i < n; ++i) mags(i) = std::min(mags(i), mu);

    Decomposition dec;
    dec.mu = mu;
    dec.k = k;

    RVec w = mags;     // residual; keeps ||w||_1 = mass and the entrywise cap
    double rho = 1.0;  // weight not yet assigned
    const long max_iters = static_cast<long>(n) * static_cast<long>(n) + 4;

    const auto emit = [&](const RVec& magnitudes, double weight) {
        RVec atom = magnitudes.cwiseProduct(signs);
        dec.weights.push_back(weight);
        dec.atoms.push_back(std::move(atom));
    };

    // The residual picks up l1 drift amplified by the 1/(1 - lam) divisions;
    // its weight rho shrinks by the inverse factor, so restoring the exact
    // mass on the final atom perturbs the reconstruction only at the
    // unamplified roundoff level.
    const auto repair_mass = [&](RVec atom) {
        double deficit = mass - l1_of(atom);
        if (deficit < 0.0) {
            const double current = l1_of(atom);
            if (current > 0.0) atom *= mass / current;
            return atom;
        }
        int occupied = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (atom(i) > kZeroTol) ++occupied;
        }
        // Top up coordinates that already count toward the sparsity budget,
        // then open fresh supp(v) slots while the budget allows.
        for (Eigen::Index i = 0; i < n && deficit > 0.0; ++i) {
            if (atom(i) <= kZeroTol) continue;
            const double add = std::min(deficit, mu - atom(i));
            if (add > 0.0) {
                atom(i) += add;
                deficit -= add;
            }
        }
        for (Eigen::Index i = 0; i < n && deficit > 0.0 && occupied < k; ++i) {
            if (atom(i) > kZeroTol || mags(i) <= kZeroTol) continue;
            const double add = std::min(deficit, mu - atom(i));
            atom(i) += add;
            deficit -= add;
            if (atom(i) > kZeroTol) ++occupied;
        }
        return atom;
    };

    for (long iter = 0; iter < max_iters; ++iter) {
        int support = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w(i) > kZeroTol) ++support;
        }
        if (support <= k) {
            emit(repair_mass(w), rho); // residual is already k-sparse
            return dec;
        }

        // Water-fill the k largest residual entries with the full l1 mass,
        // capped entrywise at mu. Filling in descending order keeps entries
        // that sit exactly at mu pinned there.
        const auto order = descending_order(w);
        RVec atom = RVec::Zero(n);
        double rest = mass;
        for (int t = 0; t < k && rest > 0.0; ++t) {
            const int idx = order[static_cast<std::size_t>(t)];
            atom(idx) = std::min(mu, rest);
            rest -= atom(idx);
        }

        // Largest weight keeping the residual (w - lam * atom) / (1 - lam)
        // inside {>= 0, entrywise <= mu}. Either some coordinate reaches zero
        // (support shrinks) or some coordinate reaches mu (and stays there).
        // Coordinates already sitting at mu are exempt from the cap
        // constraint; the clamp below absorbs their roundoff overshoot.
        double lam = 1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (atom(i) > 0.0) lam = std::min(lam, w(i) / atom(i));
            const double headroom = mu - atom(i);
            if (headroom > 0.0 && w(i) < mu * (1.0 - 1e-12))
                lam = std::min(lam, (mu - w(i)) / headroom);
        }
        if (!(lam > 0.0)) throw NumericFailure("decomposition stalled (tolerance pathology)");
        if (lam >= 1.0 - kFeasSlack) {
            emit(atom, rho);
            return dec;
        }

        emit(atom, rho * lam);
        rho *= 1.0 - lam;
        for (Eigen::Index i = 0; i < n; ++i) {
            w(i) = std::clamp((w(i) - lam * atom(i)) / (1.0 - lam), 0.0, mu);
        }
        // The divisions above amplify l1 drift by 1/(1 - lam); pin the mass
        // back to its invariant value every step.
        const double current = l1_of(w);
        if (current > 0.0) {
            const double rescale = mass / current;
            for (Eigen::Index i = 0; i < n; ++i) w(i) = std::min(w(i) * rescale, mu);
        }
    }
    throw NumericFailure("decomposition did not terminate");
}

DecompositionCheck validate_decomposition(const Decomposition& dec, const RVec& v, int k,
                                          double mu) {
    const auto fail = [](std::string why) { return DecompositionCheck{false, std::move(why)}; };
    if (dec.weights.empty() || dec.weights.size() != dec.atoms.size())
        return fail("empty or inconsistent decomposition");

    double wsum = 0.0;
    for (double lam : dec.weights) {
        if (lam < -1e-12) return fail("negative weight");
        wsum += lam;
    }
    if (std::abs(wsum - 1.0) > 1e-9) return fail("weights do not sum to one");

    const double mass = l1_of(v);
    RVec recombined = RVec::Zero(v.size());
    for (std::size_t t = 0; t < dec.atoms.size(); ++t) {
        const RVec& u = dec.atoms[t];
        if (u.size() != v.size()) return fail("atom dimension mismatch");
        int nnz = 0;
        double umass = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            const double mag = std::abs(u(i));
            if (mag > kZeroTol) {
                ++nnz;
                if (std::abs(v(i)) <= kZeroTol) return fail("atom support escapes supp(v)");
            }
            if (mag > mu + 1e-9 * std::max(1.0, mu)) return fail("atom exceeds the linf cap");
            umass += mag;
        }
        if (nnz > k) return fail("atom is not k-sparse");
        if (std::abs(umass - mass) > 1e-9 * std::max(1.0, mass))
            return fail("atom l1 mass differs from ||v||_1");
        recombined += dec.weights[t] * u;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(recombined(i) - v(i)) > 1e-10) return fail("convex combination misses v");
    }
    return {};
}

CVec phase_diagonal(const CVec& w) {
    CVec out(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double mag = std::abs(w(i));
        out(i) = mag > kZeroTol ? w(i) / mag : cplx{1.0, 0.0};
    }
    return out;
}

IndexSet top_k_indices(const CVec& v, int k) {
    if (k < 0 || k > v.size()) throw InvalidParameter("top_k_indices: k out of range");
    std::vector<int> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(v(a)) > std::abs(v(b)); });
    order.resize(static_cast<std::size_t>(k));
    return IndexSet::of_unsorted(std::move(order), static_cast<int>(v.size()));
}

IndexSet SupportPartition::t01(int bound) const {
    if (blocks.empty()) return t0;
    return IndexSet::unite(t0, blocks.front(), bound);
}

IndexSet SupportPartition::t01_complement(int bound) const {
    return IndexSet::complement(t01(bound), bound);
}

SupportPartition build_partition(const CVec& coeffs, const IndexSet& t0, double r, int k) {
    const int N = static_cast<int>(coeffs.size());
    if (!t0.empty() && t0.indices().back() >= N) throw InvalidParameter("T0 out of range");
    if (k < 1 || !(r > 0.0) || r * k < 1.0 - kFeasSlack)
        throw InvalidParameter("partition requires r k >= 1");
    const int block = static_cast<int>(std::ceil(r * static_cast<double>(k) - kFeasSlack));

    SupportPartition part;
    part.t0 = t0;
    part.block_size = block;
    part.r = r;
    part.k = k;

    const IndexSet rest = IndexSet::complement(t0, N);
    std::vector<int> order(rest.indices());
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return std::abs(coeffs(a)) > std::abs(coeffs(b)); });
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(block)) {
        const auto stop = std::min(order.size(), start + static_cast<std::size_t>(block));
        part.blocks.push_back(IndexSet::of_unsorted(
            std::vector<int>(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(stop)),
            N));
    }
    return part;
}

bool ProofCheckReport::all_passed() const {
    for (const auto& check : checks) {
        if (!check.passed) return false;
    }
    return true;
}

const ProofCheck* ProofCheckReport::find(const std::string& name) const {
    for (const auto& check : checks) {
        if (check.name == name) return &check;
    }
    return nullptr;
}

namespace {

bool check_passes(double lhs, double rhs) { return rhs - lhs >= -1e-9 * std::max(1.0, std::abs(rhs)); }

ProofCheck make_check(std::string name, double lhs, double rhs) {
    ProofCheck check;
    check.name = std::move(name);
    check.lhs = lhs;
    check.rhs = rhs;
    check.passed = check_passes(lhs, rhs);
    return check;
}

double norm2_on(const CVec& v, const IndexSet& s) {
    double acc = 0.0;
    for (int j : s.indices()) acc += std::norm(v(j));
    return std::sqrt(acc);
}

double norm1_on(const CVec& v, const IndexSet& s) {
    double acc = 0.0;
    for (int j : s.indices()) acc += std::abs(v(j));
    return acc;
}

// Shared context for both proof chains.
struct ChainContext {
    CVec xhat;     // phase-aligned candidate
    CVec c;        // D* xhat
    CVec c0;       // D* x0
    SupportPartition part;
    IndexSet t0, t1, t01, t01c;
    CMat G;        // c c* - c0 c0*
    CMat Gbar;     // T01-restricted difference
    double gbar_f = 0.0;
    double h_f = 0.0; // || xhat xhat* - x0 x0* ||_F
    double r_eff = 0.0;
};

ChainContext build_context(const ProblemInstance& inst, const CVec& xhat, T0Choice choice) {
    if (core::norm2(inst.x0) <= kZeroTol) throw DegenerateInput("instance has x0 = 0");
    if (xhat.size() != inst.x0.size()) throw InvalidParameter("candidate dimension mismatch");

    ChainContext ctx;
    ctx.c0 = analysis(inst.dict, inst.x0);
    ctx.xhat = phase_align(xhat, inst.x0);
    ctx.c = analysis(inst.dict, ctx.xhat);

    const int N = inst.dict.atoms();
    switch (choice) {
        case T0Choice::support_z0:
            ctx.t0 = inst.z0.support;
            break;
        case T0Choice::analysis_support: {
            std::vector<int> sup;
            for (int j = 0; j < N; ++j) {
                if (std::abs(ctx.c0(j)) > kZeroTol) sup.push_back(j);
            }
            ctx.t0 = IndexSet::of(std::move(sup), N);
            break;
        }
        case T0Choice::top_k_analysis:
            ctx.t0 = top_k_indices(ctx.c0, inst.k);
            break;
    }
    ctx.part = build_partition(ctx.c, ctx.t0, inst.r, inst.k);
    ctx.t1 = ctx.part.blocks.empty() ? IndexSet{} : ctx.part.blocks.front();
    ctx.t01 = ctx.part.t01(N);
    ctx.t01c = ctx.part.t01_complement(N);

    ctx.G = ctx.c * ctx.c.adjoint() - ctx.c0 * ctx.c0.adjoint();
    const CVec cr = restrict_to(ctx.c, ctx.t01);
    const CVec c0r = restrict_to(ctx.c0, ctx.t01);
    ctx.Gbar = cr * cr.adjoint() - c0r * c0r.adjoint();
    ctx.gbar_f = core::frobenius_norm(ctx.Gbar);
    ctx.h_f = lifted_distance(ctx.xhat, inst.x0);
    ctx.r_eff = static_cast<double>(ctx.part.block_size) / static_cast<double>(inst.k);
    return ctx;
}

void fill_report_meta(ProofCheckReport& report, const ChainContext& ctx) {
    report.r_eff = ctx.r_eff;
    report.block_size = ctx.part.block_size;
    report.t1_size = ctx.t1.size();
    report.t1_partial = !ctx.part.blocks.empty() && ctx.t1.size() < ctx.part.block_size;
}

} // namespace

ProofCheckReport verify_l1_proof_chain(const ProblemInstance& inst, const CVec& xhat, double alpha,
                                       double beta, T0Choice t0_choice) {
    if (!(beta > 0.0) || !(alpha > 0.0))
        throw InvalidParameter("proof chain requires positive (alpha, beta)");
    const ChainContext ctx = build_context(inst, xhat, t0_choice);
    const double m = static_cast<double>(inst.ensemble.count());
    const double sqrt_reff = std::sqrt(ctx.r_eff);
    const double block = static_cast<double>(ctx.part.block_size);

    ProofCheckReport report;
    fill_report_meta(report, ctx);

    // Cone constraint: off-block l1 mass of the lifted difference is
    // dominated by the T0 x T0 block.
    const double on_block = core::entrywise_lq_norm(restrict_block(ctx.G, ctx.t0, ctx.t0), 1.0);
    const double off_block = core::entrywise_lq_norm(ctx.G, 1.0) - on_block;
    report.checks.push_back(make_check("cone_constraint", off_block, on_block));

    // Tail blocks decay: ||c_Ti||_2 <= ||c_T(i-1)||_1 / sqrt(block) for i >= 2.
    {
        double worst_slack = std::numeric_limits<double>::infinity();
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 1; i < ctx.part.blocks.size(); ++i) {
            const double cur = norm2_on(ctx.c, ctx.part.blocks[i]);
            const double prev = norm1_on(ctx.c, ctx.part.blocks[i - 1]) / std::sqrt(block);
            if (prev - cur < worst_slack) {
                worst_slack = prev - cur;
                lhs = cur;
                rhs = prev;
            }
        }
        report.checks.push_back(make_check("tail_block_bound", lhs, rhs));
    }

    // Step 1 aggregate: || G - Gbar ||_F <= (1/r + 4/sqrt(r)) || Gbar ||_F.
    report.checks.push_back(make_check("step1_aggregate", core::frobenius_norm(ctx.G - ctx.Gbar),
                                       (1.0 / ctx.r_eff + 4.0 / sqrt_reff) * ctx.gbar_f));

    // Atom norms from the sparse convex decomposition of the de-phased tail.
    {
        double lhs = 0.0;
        const double rhs = std::sqrt(ctx.gbar_f / ctx.r_eff);
        const int tail = ctx.t01c.size();
        if (tail > 0) {
            RVec vtail(tail);
            int p = 0;
            for (int j : ctx.t01c.indices()) vtail(p++) = std::abs(ctx.c(j));
            const double t1_l1 = norm1_on(ctx.c, ctx.t1);
            const double tail_l1 = l1_of(vtail);
            const double mu = std::max(
                ctx.t1.size() > 0 ? t1_l1 / static_cast<double>(ctx.t1.size()) : 0.0,
                tail_l1 / block);
            if (mu > 0.0 && tail_l1 > 0.0) {
                const auto dec = sparse_convex_decompose(vtail, ctx.part.block_size, mu);
                for (const auto& atom : dec.atoms) lhs = std::max(lhs, atom.norm());
            }
        }
        report.checks.push_back(make_check("atom_norm_bound", lhs, rhs));
    }

    // Off-diagonal measurement bound for rows T0 and T1 against the tail.
    {
        const CVec diff = restrict_to(ctx.c, ctx.t01) - ctx.c0;
        const double diff_norm = core::norm2(diff);
        double worst_slack = std::numeric_limits<double>::infinity();
        double lhs = 0.0, rhs = 0.0;
        const IndexSet rows[2] = {ctx.t0, ctx.t1};
        for (const auto& row : rows) {
            if (row.empty() || ctx.t01c.empty()) continue;
            const CMat M = restrict_block(ctx.G, row, ctx.t01c) + restrict_block(ctx.G, ctx.t01c, row);
            const RVec meas = apply_lifted(inst.ensemble, inst.dict.matrix * M * inst.dict.matrix.adjoint());
            double l = 0.0;
            for (Eigen::Index i = 0; i < meas.size(); ++i) l += std::abs(meas(i));
            l /= m;
            const double rh = 2.0 * beta / sqrt_reff * norm2_on(ctx.c, row) * diff_norm;
            if (rh - l < worst_slack) {
                worst_slack = rh - l;
                lhs = l;
                rhs = rh;
            }
        }
        report.checks.push_back(make_check("offdiag_measurement_bound", lhs, rhs));
    }

    // Tail-tail measurement bound.
    {
        double lhs = 0.0;
        if (!ctx.t01c.empty()) {
            const CMat M = restrict_block(ctx.G, ctx.t01c, ctx.t01c);
            const RVec meas = apply_lifted(inst.ensemble, inst.dict.matrix * M * inst.dict.matrix.adjoint());
            for (Eigen::Index i = 0; i < meas.size(); ++i) lhs += std::abs(meas(i));
            lhs /= m;
        }
        report.checks.push_back(
            make_check("tailtail_measurement_bound", lhs, beta / ctx.r_eff * ctx.gbar_f));
    }

    // Final assembly.
    report.checks.push_back(make_check(
        "final_assembly", ctx.h_f, (1.0 / ctx.r_eff + 4.0 / sqrt_reff + 1.0) * ctx.gbar_f));
    return report;
}

ProofCheckReport verify_lq_proof_chain(const ProblemInstance& inst, const CVec& xhat, double q,
                                       T0Choice t0_choice) {
    if (!(q > 0.0) || q > 1.0) throw InvalidParameter("q must lie in (0, 1]");
    const ChainContext ctx = build_context(inst, xhat, t0_choice);
    const int N = inst.dict.atoms();

    ProofCheckReport report;
    fill_report_meta(report, ctx);

    const IndexSet t0c = IndexSet::complement(ctx.t0, N);
    report.checks.push_back(
        make_check("lq_cone_constraint",
                   core::entrywise_lq_norm(restrict_block(ctx.G, t0c, t0c), q),
                   core::entrywise_lq_norm(restrict_block(ctx.G, ctx.t0, ctx.t0), q)));

    const double gbar_q = std::pow(ctx.gbar_f, q);
    report.checks.push_back(make_check(
        "lq_tail_bound",
        std::pow(core::frobenius_norm(restrict_block(ctx.G, ctx.t01c, ctx.t01c)), q),
        std::pow(ctx.r_eff, q - 2.0) * gbar_q));

    {
        double worst_slack = std::numeric_limits<double>::infinity();
        double lhs = 0.0;
        const double rhs = std::pow(2.0, q / 2.0) / std::pow(ctx.r_eff, 1.0 - q / 2.0) * gbar_q;
        const IndexSet rows[2] = {ctx.t0, ctx.t1};
        for (const auto& row : rows) {
            double sum = 0.0;
            for (std::size_t j = 1; j < ctx.part.blocks.size(); ++j) {
                sum += std::pow(
                    core::frobenius_norm(restrict_block(ctx.G, row, ctx.part.blocks[j])), q);
            }
            if (rhs - sum < worst_slack) {
                worst_slack = rhs - sum;
                lhs = sum;
            }
        }
        report.checks.push_back(make_check("lq_cross_block_bound", lhs, rhs));
    }

    report.checks.push_back(make_check(
        "lq_final_assembly", std::pow(ctx.h_f, q),
        (std::pow(ctx.r_eff, q - 2.0) + std::pow(2.0, q / 2.0) * std::pow(ctx.r_eff, q / 2.0 - 1.0) +
         1.0) *
            gbar_q));
    return report;
}

std::string proof_report_csv(const ProofCheckReport& report) {
    std::ostringstream out;
    out << "check_name,lhs,rhs,slack,passed\n";
    for (const auto& check : report.checks) {
        out << check.name << ',' << io::real_token(check.lhs) << ',' << io::real_token(check.rhs)
            << ',' << io::real_token(check.slack()) << ',' << (check.passed ? "true" : "false")
            << '\n';
    }
    return out.str();
}

} // namespace dspr
