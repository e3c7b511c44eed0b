#pragma once

// One experiment = dataset split + method + trainer settings + output
// directory, serialized as a single JSON file so sweeps are auditable and a
// run can be reproduced from its echoed config alone.

#include <string>

#include "ossgan/dataset.hpp"
#include "ossgan/trainer.hpp"

namespace ossgan {

struct ExperimentConfig {
    SplitConfig split;
    MethodSpec method;
    TrainConfig train;
    std::string out_dir;
};

// round-trips losslessly: parse(serialize(c)) reproduces every field bitwise
std::string serialize_experiment(const ExperimentConfig& cfg);
// partial files are allowed (absent fields keep their defaults); unknown
// keys raise ConfigError so typos cannot silently revert to defaults
ExperimentConfig parse_experiment(const std::string& text);

void save_experiment(const std::string& path, const ExperimentConfig& cfg);
ExperimentConfig load_experiment(const std::string& path);

}  // namespace ossgan
