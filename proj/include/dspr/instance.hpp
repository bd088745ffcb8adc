#pragma once

#include <string>

#include "dspr/dictionary.hpp"
#include "dspr/measurement.hpp"

namespace dspr {

// Everything a solver or verifier needs for one recovery problem.
struct ProblemInstance {
    Dictionary dict;
    MeasurementEnsemble ensemble;
    CVec x0;
    SparseCoefficients z0;
    MeasurementRecord record;
    int k = 1;
    double r = 4.0;
    double q = 1.0;
};

struct InstanceParams {
    int n = 8;
    int N = 8;
    int m = 64;
    int k = 2;
    DictionaryFamily family = DictionaryFamily::identity;
    double epsilon = 0.0;
    double r = 4.0;
    double q = 1.0;
    double signal_norm = 1.0;
};

// Deterministic in (params, seed); dictionary, ensemble, ground truth and
// noise use independent derived substreams.
ProblemInstance make_instance(const InstanceParams& params, std::uint64_t seed);

// Writes dictionary.txt, ensemble.txt, x0.txt, z0.txt, measurements.csv and
// meta.json into dir (created if missing).
void save_instance(const ProblemInstance& instance, const std::string& dir);
ProblemInstance load_instance(const std::string& dir);

} // namespace dspr
