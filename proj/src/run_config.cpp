#include "csvm/run_config.hpp"

#include <fstream>

#include "csvm/error.hpp"
#include "csvm/model_io.hpp"

namespace csvm {

using nlohmann::json;

RunConfig run_config_from_json(const json& j) {
    RunConfig cfg;
    try {
        if (j.contains("dataset_root")) cfg.dataset_root = j.at("dataset_root").get<std::string>();
        if (j.contains("split_file")) cfg.split_file = j.at("split_file").get<std::string>();
        if (j.contains("input_size")) {
            const auto& size = j.at("input_size");
            if (!size.is_array() || size.size() != 2) {
                throw InvalidArgument("input_size must be [height, width]");
            }
            cfg.input_height = size[0].get<int>();
            cfg.input_width = size[1].get<int>();
        }
        if (j.contains("positive_class")) {
            cfg.positive_class = j.at("positive_class").get<std::string>();
        }
        if (j.contains("train_fraction")) cfg.train_fraction = j.at("train_fraction").get<double>();
        if (j.contains("arch")) {
            cfg.arch.clear();
            for (const auto& b : j.at("arch")) {
                BlockSpec spec;
                spec.n_filters = b.at("n_filters").get<int>();
                spec.kernel = b.at("kernel").get<int>();
                spec.stride = b.at("stride").get<int>();
                if (b.contains("pool")) {
                    const auto& p = b.at("pool");
                    spec.pool.window = p.at("window").get<int>();
                    spec.pool.stride = p.at("stride").get<int>();
                    spec.pool.mode = pool_mode_from_name(p.value("mode", "max"));
                }
                spec.activation = activation_from_name(b.value("activation", "relu"));
                cfg.arch.push_back(spec);
            }
        }
        if (j.contains("train")) {
            const auto& t = j.at("train");
            cfg.train.svm_c = t.value("svm_c", cfg.train.svm_c);
            cfg.train.tol = t.value("tol", cfg.train.tol);
            cfg.train.max_iter = t.value("max_iter", cfg.train.max_iter);
            cfg.train.per_image_patches = t.value("per_image_patches", cfg.train.per_image_patches);
            cfg.train.subset_per_class = t.value("subset_per_class", cfg.train.subset_per_class);
            cfg.train.patch_source_images =
                t.value("patch_source_images", cfg.train.patch_source_images);
            cfg.train.master_seed = t.value("master_seed", cfg.train.master_seed);
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
    json arch = json::array();
    for (const auto& b : cfg.arch) {
        arch.push_back({{"activation", activation_name(b.activation)},
                        {"kernel", b.kernel},
                        {"n_filters", b.n_filters},
                        {"pool",
                         {{"mode", pool_mode_name(b.pool.mode)},
                          {"stride", b.pool.stride},
                          {"window", b.pool.window}}},
                        {"stride", b.stride}});
    }
    return {{"arch", arch},
            {"dataset_root", cfg.dataset_root},
            {"input_size", {cfg.input_height, cfg.input_width}},
            {"positive_class", cfg.positive_class},
            {"split_file", cfg.split_file},
            {"train",
             {{"master_seed", cfg.train.master_seed},
              {"max_iter", cfg.train.max_iter},
              {"patch_source_images", cfg.train.patch_source_images},
              {"per_image_patches", cfg.train.per_image_patches},
              {"subset_per_class", cfg.train.subset_per_class},
              {"svm_c", cfg.train.svm_c},
              {"tol", cfg.train.tol}}},
            {"train_fraction", cfg.train_fraction}};
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidArgument("config file " + path + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

void validate(const RunConfig& cfg) {
    if (cfg.input_height < 1 || cfg.input_width < 1) {
        throw InvalidArgument("input size must be positive");
    }
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must be in (0, 1)");
    }
    if (cfg.arch.empty()) throw InvalidArgument("architecture must have at least one block");
    for (const auto& b : cfg.arch) {
        if (b.n_filters < 1) throw InvalidArgument("n_filters must be positive");
        if (b.kernel < 1 || b.stride < 1) throw InvalidArgument("kernel and stride must be positive");
        if (b.pool.window < 1 || b.pool.stride < 1) {
            throw InvalidArgument("pool window and stride must be positive");
        }
    }
    const TrainConfig& t = cfg.train;
    if (t.svm_c <= 0 || t.tol <= 0 || t.max_iter < 1 || t.per_image_patches < 1 ||
        t.subset_per_class < 1 || t.patch_source_images < 1) {
        throw InvalidArgument("train config values must be positive");
    }
    // The geometry chain must stay valid through every block; walking it here
    // fails fast instead of deep inside training.
    int h = cfg.input_height, w = cfg.input_width;
    for (std::size_t i = 0; i < cfg.arch.size(); ++i) {
        const auto& b = cfg.arch[i];
        try {
            h = conv_output_size(h, 0, b.kernel, b.stride);
            w = conv_output_size(w, 0, b.kernel, b.stride);
            h = conv_output_size(h, 0, b.pool.window, b.pool.stride);
            w = conv_output_size(w, 0, b.pool.window, b.pool.stride);
        } catch (const Error& e) {
            throw InvalidArgument("block " + std::to_string(i + 1) +
                                  " does not fit the input size: " + e.what());
        }
    }
}

} // namespace csvm
