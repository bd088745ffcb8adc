#include "dspr/measurement.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dspr/core.hpp"
#include "dspr/kernels.hpp"
#include "dspr/rng.hpp"
#include "dspr/serialize.hpp"

namespace dspr {

const char* to_string(EnsembleKind kind) {
    return kind == EnsembleKind::complex_gaussian ? "complex_gaussian" : "explicit";
}

EnsembleKind ensemble_kind_from_string(const std::string& name) {
    if (name == "complex_gaussian") return EnsembleKind::complex_gaussian;
    if (name == "explicit") return EnsembleKind::explicit_vectors;
    throw InvalidParameter("unknown ensemble kind: " + name);
}

MeasurementEnsemble explicit_ensemble(CMat vectors) {
    if (vectors.rows() < 1 || vectors.cols() < 1)
        throw InvalidParameter("ensemble must contain at least one vector");
    return {std::move(vectors), EnsembleKind::explicit_vectors};
}

MeasurementEnsemble gaussian_ensemble(int m, int n, std::uint64_t seed) {
    if (m < 1 || n < 1) throw InvalidParameter("ensemble dimensions must be positive");
    Rng rng(seed);
    CMat vectors(n, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) vectors(j, i) = rng.cnormal();
    return {std::move(vectors), EnsembleKind::complex_gaussian};
}

RVec apply_map(const MeasurementEnsemble& ens, const CVec& x) {
    if (x.size() != ens.dim()) throw InvalidParameter("apply_map: dimension mismatch");
    const auto n = static_cast<std::size_t>(ens.dim());
    RVec out(ens.count());
    for (int i = 0; i < ens.count(); ++i) {
        const cplx z = kernels::cdot(ens.vectors.col(i).data(), x.data(), n);
        out(i) = z.real() * z.real() + z.imag() * z.imag();
    }
    return out;
}

RVec apply_lifted(const MeasurementEnsemble& ens, const CMat& X) {
    if (X.rows() != ens.dim() || X.cols() != ens.dim())
        throw InvalidParameter("apply_lifted: dimension mismatch");
    const auto n = static_cast<std::size_t>(ens.dim());
    RVec out(ens.count());
    for (int i = 0; i < ens.count(); ++i) {
        const CVec xa = X * ens.vectors.col(i);
        out(i) = kernels::cdot(ens.vectors.col(i).data(), xa.data(), n).real();
    }
    return out;
}

MeasurementRecord add_bounded_noise(const RVec& clean, double epsilon, std::uint64_t seed) {
    if (epsilon < 0.0) throw InvalidParameter("noise budget must be nonnegative");
    MeasurementRecord record;
    record.clean = clean;
    record.epsilon = epsilon;
    record.noise = RVec::Zero(clean.size());
    if (epsilon > 0.0 && clean.size() > 0) {
        Rng rng(seed);
        double len = 0.0;
        while (len == 0.0) {
            for (Eigen::Index i = 0; i < clean.size(); ++i) record.noise(i) = rng.normal();
            len = record.noise.norm();
        }
        record.noise *= epsilon / len; // exercises the worst case ||e||_2 = epsilon
    }
    record.y = record.clean + record.noise;
    return record;
}

double phase_aligned_distance(const CVec& u, const CVec& v) {
    if (u.size() != v.size()) throw InvalidParameter("phase_aligned_distance: dimension mismatch");
    const double sq =
        core::norm2_sq(u) + core::norm2_sq(v) - 2.0 * std::abs(core::inner(u, v));
    return std::sqrt(std::max(0.0, sq));
}

double lifted_distance(const CVec& u, const CVec& v) {
    if (u.size() != v.size()) throw InvalidParameter("lifted_distance: dimension mismatch");
    const double uu = core::norm2_sq(u);
    const double vv = core::norm2_sq(v);
    const double uv = std::abs(core::inner(u, v));
    return std::sqrt(std::max(0.0, uu * uu + vv * vv - 2.0 * uv * uv));
}

CVec phase_align(const CVec& u, const CVec& ref) {
    const cplx s = core::inner(u, ref);
    const double mag = std::abs(s);
    if (mag <= kZeroTol) return u;
    return (s / mag) * u;
}

void save_record_csv(const MeasurementRecord& record, const std::string& path) {
    std::ostringstream out;
    out << "index,y,clean,noise\n";
    for (Eigen::Index i = 0; i < record.y.size(); ++i) {
        out << i << ',' << io::real_token(record.y(i)) << ',' << io::real_token(record.clean(i))
            << ',' << io::real_token(record.noise(i)) << '\n';
    }
    io::write_text_file(path, out.str());
}

MeasurementRecord load_record_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "index,y,clean,noise")
        throw IoError("bad measurement CSV header in " + path);
    std::vector<double> y, clean, noise;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = io::split(line, ',');
        if (fields.size() != 4) throw IoError("bad measurement CSV row in " + path);
        y.push_back(std::stod(fields[1]));
        clean.push_back(std::stod(fields[2]));
        noise.push_back(std::stod(fields[3]));
    }
    MeasurementRecord record;
    const auto m = static_cast<Eigen::Index>(y.size());
    record.y = Eigen::Map<RVec>(y.data(), m);
    record.clean = Eigen::Map<RVec>(clean.data(), m);
    record.noise = Eigen::Map<RVec>(noise.data(), m);
    record.epsilon = record.noise.norm();
    return record;
}

void save_ensemble(const MeasurementEnsemble& ens, const std::string& path) {
    io::write_matrix_file(path, ens.vectors, to_string(ens.kind));
}

MeasurementEnsemble load_ensemble(const std::string& path) {
    auto [vectors, tag] = io::read_matrix_file(path);
    MeasurementEnsemble ens;
    ens.vectors = std::move(vectors);
    ens.kind = ensemble_kind_from_string(tag);
    if (ens.dim() < 1 || ens.count() < 1) throw IoError("empty ensemble in " + path);
    return ens;
}

} // namespace dspr
