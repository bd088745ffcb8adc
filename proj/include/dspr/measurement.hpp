#pragma once

#include <string>

#include "dspr/types.hpp"

namespace dspr {

enum class EnsembleKind { complex_gaussian, explicit_vectors };

const char* to_string(EnsembleKind kind);
EnsembleKind ensemble_kind_from_string(const std::string& name);

// Measurement vectors a_1..a_m defining the quadratic map
// A(X) = (a_i^* X a_i)_i; stored as columns of an n x m matrix.
struct MeasurementEnsemble {
    CMat vectors; // n x m, column i = a_i
    EnsembleKind kind = EnsembleKind::explicit_vectors;

    int dim() const { return static_cast<int>(vectors.rows()); }   // n
    int count() const { return static_cast<int>(vectors.cols()); } // m
};

MeasurementEnsemble explicit_ensemble(CMat vectors);

// i.i.d. standard complex Gaussian entries (E|a_jk|^2 = 1), deterministic in seed.
MeasurementEnsemble gaussian_ensemble(int m, int n, std::uint64_t seed);

// Intensity measurements (|<a_i, x>|^2)_i. Invariant under global phase of x.
RVec apply_map(const MeasurementEnsemble& ens, const CVec& x);

// Lifted linear action (a_i^* X a_i)_i on Hermitian X; agrees with apply_map
// at X = x x^*.
RVec apply_lifted(const MeasurementEnsemble& ens, const CMat& X);

// Noisy intensities y = clean + e with ||e||_2 = epsilon exactly.
struct MeasurementRecord {
    RVec y;
    RVec clean;
    RVec noise;
    double epsilon = 0.0;
};

MeasurementRecord add_bounded_noise(const RVec& clean, double epsilon, std::uint64_t seed);

// min over |c| = 1 of ||c u - v||_2, in closed form.
double phase_aligned_distance(const CVec& u, const CVec& v);

// ||u u^* - v v^*||_F without forming the outer products.
double lifted_distance(const CVec& u, const CVec& v);

// Rotate u by the unimodular phase that makes <u, ref> real and >= 0.
CVec phase_align(const CVec& u, const CVec& ref);

void save_record_csv(const MeasurementRecord& record, const std::string& path);
MeasurementRecord load_record_csv(const std::string& path);

void save_ensemble(const MeasurementEnsemble& ens, const std::string& path);
MeasurementEnsemble load_ensemble(const std::string& path);

} // namespace dspr
