#include "dspr/dictionary.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstring>

#include "dspr/core.hpp"
#include "dspr/rng.hpp"
#include "dspr/serialize.hpp"

namespace dspr {

const char* to_string(DictionaryFamily family) {
    switch (family) {
        case DictionaryFamily::identity: return "identity";
        case DictionaryFamily::truncated_unitary: return "truncated_unitary";
        case DictionaryFamily::harmonic_frame: return "harmonic_frame";
    }
    return "unknown";
}

DictionaryFamily dictionary_family_from_string(const std::string& name) {
    if (name == "identity") return DictionaryFamily::identity;
    if (name == "truncated_unitary") return DictionaryFamily::truncated_unitary;
    if (name == "harmonic_frame") return DictionaryFamily::harmonic_frame;
    throw InvalidParameter("unknown dictionary family: " + name);
}

double frame_deviation(const Dictionary& dict) {
    const CMat gram = dict.matrix * dict.matrix.adjoint();
    return (gram - CMat::Identity(dict.dim(), dict.dim())).cwiseAbs().maxCoeff();
}

namespace {

CMat haar_unitary(int N, std::uint64_t seed) {
    Rng rng(seed);
    CMat g(N, N);
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i) g(i, j) = rng.cnormal();
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ();
    const CMat r = qr.matrixQR();
    // Fix column phases so the implied R has positive real diagonal; this is
    // what makes the QR output Haar-distributed.
    for (Eigen::Index j = 0; j < N; ++j) {
        const double mag = std::abs(r(j, j));
        const cplx phase = mag > 0.0 ? r(j, j) / mag : cplx{1.0, 0.0};
        q.col(j) *= phase;
    }
    return q;
}

} // namespace

Dictionary make_dictionary(DictionaryFamily family, int n, int N, std::uint64_t seed) {
    if (n < 1 || N < 1) throw InvalidParameter("dictionary dimensions must be positive");
    if (n > N) throw InvalidParameter("dictionary requires n <= N");
    Dictionary dict;
    dict.family = family;
    switch (family) {
        case DictionaryFamily::identity: {
            if (n != N) throw InvalidParameter("identity dictionary requires n = N");
            dict.matrix = CMat::Identity(n, N);
            break;
        }
        case DictionaryFamily::truncated_unitary: {
            dict.matrix = haar_unitary(N, seed).topRows(n);
            break;
        }
        case DictionaryFamily::harmonic_frame: {
            dict.matrix.resize(n, N);
            const double scale = 1.0 / std::sqrt(static_cast<double>(N));
            const double step = -2.0 * 3.14159265358979323846 / static_cast<double>(N);
            for (int j = 0; j < n; ++j) {
                for (int l = 0; l < N; ++l) {
                    const double angle = step * static_cast<double>(j) * static_cast<double>(l);
                    dict.matrix(j, l) = scale * cplx{std::cos(angle), std::sin(angle)};
                }
            }
            break;
        }
    }
    if (frame_deviation(dict) > 1e-10)
        throw NumericFailure("constructed dictionary violates DD* = I");
    return dict;
}

CVec analysis(const Dictionary& dict, const CVec& x) {
    if (x.size() != dict.dim()) throw InvalidParameter("analysis: dimension mismatch");
    return dict.matrix.adjoint() * x;
}

CVec synthesize(const Dictionary& dict, const CVec& z) {
    if (z.size() != dict.atoms()) throw InvalidParameter("synthesize: dimension mismatch");
    return dict.matrix * z;
}

CVec synthesize(const Dictionary& dict, const SparseCoefficients& coeffs) {
    return synthesize(dict, coeffs.z);
}

std::pair<CVec, SparseCoefficients> random_dictionary_sparse_signal(const Dictionary& dict, int k,
                                                                    std::uint64_t seed, double norm) {
    const int N = dict.atoms();
    if (k < 1 || k > N) throw InvalidParameter("sparsity k must lie in [1, N]");
    if (!(norm > 0.0)) throw InvalidParameter("target norm must be positive");
    Rng rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        const IndexSet support = IndexSet::of(rng.subset(N, k), N);
        CVec z = CVec::Zero(N);
        for (int j : support.indices()) z(j) = rng.cnormal();
        CVec x0 = synthesize(dict, z);
        const double len = core::norm2(x0);
        if (len <= kZeroTol) continue; // degenerate synthesis, redraw
        const double scale = norm / len;
        x0 *= scale;
        z *= scale;
        return {std::move(x0), SparseCoefficients{std::move(z), support, k}};
    }
    throw NumericFailure("could not draw a nondegenerate dictionary-sparse signal");
}

void save_dictionary(const Dictionary& dict, const std::string& path) {
    io::write_matrix_file(path, dict.matrix, to_string(dict.family));
}

Dictionary load_dictionary(const std::string& path) {
    auto [matrix, tag] = io::read_matrix_file(path);
    Dictionary dict;
    dict.matrix = std::move(matrix);
    dict.family = dictionary_family_from_string(tag);
    if (dict.dim() > dict.atoms()) throw IoError("dictionary file has n > N: " + path);
    if (frame_deviation(dict) > 1e-8) throw IoError("dictionary file violates DD* = I: " + path);
    return dict;
}

} // namespace dspr
