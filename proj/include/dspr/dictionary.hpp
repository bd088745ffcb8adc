#pragma once

#include <string>
#include <utility>

#include "dspr/types.hpp"

namespace dspr {

enum class DictionaryFamily { identity, truncated_unitary, harmonic_frame };

const char* to_string(DictionaryFamily family);
DictionaryFamily dictionary_family_from_string(const std::string& name);

// Parseval tight frame D in C^{n x N}: DD* = I_n, so the analysis operator
// D* is an isometry. All construction paths keep the frame property to
// 1e-10 componentwise.
struct Dictionary {
    CMat matrix; // n x N
    DictionaryFamily family = DictionaryFamily::identity;

    int dim() const { return static_cast<int>(matrix.rows()); }    // n
    int atoms() const { return static_cast<int>(matrix.cols()); }  // N
};

// Componentwise deviation of DD* from the identity.
double frame_deviation(const Dictionary& dict);

Dictionary make_dictionary(DictionaryFamily family, int n, int N, std::uint64_t seed);

// D* x — analysis coefficients of x (length N).
CVec analysis(const Dictionary& dict, const CVec& x);

// D z — synthesis of coefficient vector z (length n).
CVec synthesize(const Dictionary& dict, const CVec& z);

// Coefficient vector with an explicit support certificate. Entries outside
// the support are exactly zero.
struct SparseCoefficients {
    CVec z;
    IndexSet support;
    int k = 0;
};

CVec synthesize(const Dictionary& dict, const SparseCoefficients& coeffs);

// Ground truth generator: z0 with a uniform k-subset support and standard
// complex Gaussian entries, x0 = D z0 rescaled (together with z0) so that
// ||x0||_2 = norm. Degenerate draws with D z0 = 0 are redrawn.
std::pair<CVec, SparseCoefficients> random_dictionary_sparse_signal(const Dictionary& dict, int k,
                                                                    std::uint64_t seed, double norm);

void save_dictionary(const Dictionary& dict, const std::string& path);
Dictionary load_dictionary(const std::string& path);

} // namespace dspr
