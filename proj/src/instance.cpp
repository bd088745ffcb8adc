#include "dspr/instance.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

#include "dspr/core.hpp"
#include "dspr/rng.hpp"
#include "dspr/serialize.hpp"

namespace dspr {

ProblemInstance make_instance(const InstanceParams& params, std::uint64_t seed) {
    if (params.m < 1) throw InvalidParameter("instance requires m >= 1");
    ProblemInstance inst;
    inst.dict = make_dictionary(params.family, params.n, params.N, derive_seed(seed, 0));
    inst.ensemble = gaussian_ensemble(params.m, params.n, derive_seed(seed, 1));
    auto [x0, z0] =
        random_dictionary_sparse_signal(inst.dict, params.k, derive_seed(seed, 2), params.signal_norm);
    inst.x0 = std::move(x0);
    inst.z0 = std::move(z0);
    const RVec clean = apply_map(inst.ensemble, inst.x0);
    inst.record = add_bounded_noise(clean, params.epsilon, derive_seed(seed, 3));
    inst.k = params.k;
    inst.r = params.r;
    inst.q = params.q;
    return inst;
}

void save_instance(const ProblemInstance& instance, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir);
    const std::filesystem::path base(dir);
    save_dictionary(instance.dict, (base / "dictionary.txt").string());
    save_ensemble(instance.ensemble, (base / "ensemble.txt").string());
    io::write_matrix_file((base / "x0.txt").string(), instance.x0, "signal");
    io::write_matrix_file((base / "z0.txt").string(), instance.z0.z, "coefficients");
    save_record_csv(instance.record, (base / "measurements.csv").string());

    nlohmann::ordered_json meta;
    meta["k"] = instance.k;
    meta["r"] = instance.r;
    meta["q"] = instance.q;
    meta["epsilon"] = instance.record.epsilon;
    meta["support"] = instance.z0.support.indices();
    io::write_text_file((base / "meta.json").string(), meta.dump(2) + "\n");
}

ProblemInstance load_instance(const std::string& dir) {
    const std::filesystem::path base(dir);
    ProblemInstance inst;
    inst.dict = load_dictionary((base / "dictionary.txt").string());
    inst.ensemble = load_ensemble((base / "ensemble.txt").string());
    inst.x0 = io::read_matrix_file((base / "x0.txt").string()).first;
    inst.record = load_record_csv((base / "measurements.csv").string());

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(io::read_text_file((base / "meta.json").string()));
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("malformed meta.json in " + dir + ": " + e.what());
    }
    inst.k = meta.at("k").get<int>();
    inst.r = meta.at("r").get<double>();
    inst.q = meta.at("q").get<double>();
    inst.record.epsilon = meta.at("epsilon").get<double>();

    inst.z0.z = io::read_matrix_file((base / "z0.txt").string()).first;
    inst.z0.support = IndexSet::of(meta.at("support").get<std::vector<int>>(), inst.dict.atoms());
    inst.z0.k = inst.k;

    if (inst.x0.size() != inst.dict.dim() || inst.z0.z.size() != inst.dict.atoms() ||
        inst.ensemble.dim() != inst.dict.dim() || inst.record.y.size() != inst.ensemble.count())
        throw IoError("inconsistent instance files in " + dir);
    return inst;
}

} // namespace dspr
