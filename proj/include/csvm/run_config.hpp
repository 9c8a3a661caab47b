#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "csvm/net.hpp"

namespace csvm {

// Everything a CLI run needs. Loaded from a JSON file; individual CLI flags
// override file values. validate() runs before any work starts.
struct RunConfig {
    std::string dataset_root;
    std::string split_file;
    int input_height = 128;
    int input_width = 128;
    std::string positive_class = "COVID";
    double train_fraction = 0.75;
    std::vector<BlockSpec> arch = default_architecture();
    TrainConfig train;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);

// Throws InvalidArgument on any value that violates a module precondition.
void validate(const RunConfig& cfg);

} // namespace csvm
