#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "brk/param_store.hpp"
#include "brk/trainer.hpp"

namespace bnews {

// Flat key-value config document mirroring TrainConfig. Unknown keys are errors.
nlohmann::json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& doc, TrainConfig base = {});
TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base = {});

struct Checkpoint {
    TrainConfig config;
    ParamStore params;  // values only; optimizer state is not persisted
    std::size_t image_dim = 0;
    std::size_t best_epoch = 0;
    double best_val_f1 = 0.0;
    MetricsReport train_metrics;
};

// Doubles are written with shortest round-trip formatting, so a load of a
// saved checkpoint reproduces every parameter bit for bit.
std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json metrics_to_json(const MetricsReport& m);

}  // namespace bnews
