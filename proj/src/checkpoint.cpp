#include "brk/checkpoint.hpp"

#include <stdexcept>

#include "brk/io.hpp"

namespace bnews {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "brk-checkpoint/1";

template <typename T>
void read_key(const json& doc, const char* key, T& out) {
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace

json config_to_json(const TrainConfig& c) {
    return json{
        {"beta", c.beta},
        {"lr_inner", c.lr_inner},
        {"lr_outer", c.lr_outer},
        {"adam_beta1", c.adam_beta1},
        {"adam_beta2", c.adam_beta2},
        {"adam_epsilon", c.adam_epsilon},
        {"d", c.d},
        {"h", c.h},
        {"h_mid", c.h_mid},
        {"batch_size", c.batch_size},
        {"patience", c.patience},
        {"max_epochs", c.max_epochs},
        {"inner_steps_per_batch", c.inner_steps_per_batch},
        {"seed", c.seed},
        {"node_seed", c.node_seed},
        {"seq_seed", c.seq_seed},
        {"split_seed", c.split_seed},
        {"ablation", std::string(to_string(c.ablation))},
    };
}

TrainConfig config_from_json(const json& doc, TrainConfig c) {
    if (!doc.is_object()) throw std::invalid_argument("config must be a flat key-value object");
    const json known = config_to_json(c);
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
        if (value.is_structured())
            throw std::invalid_argument("config key '" + key + "' must be a scalar");
    }
    read_key(doc, "beta", c.beta);
    read_key(doc, "lr_inner", c.lr_inner);
    read_key(doc, "lr_outer", c.lr_outer);
    read_key(doc, "adam_beta1", c.adam_beta1);
    read_key(doc, "adam_beta2", c.adam_beta2);
    read_key(doc, "adam_epsilon", c.adam_epsilon);
    read_key(doc, "d", c.d);
    read_key(doc, "h", c.h);
    read_key(doc, "h_mid", c.h_mid);
    read_key(doc, "batch_size", c.batch_size);
    read_key(doc, "patience", c.patience);
    read_key(doc, "max_epochs", c.max_epochs);
    read_key(doc, "inner_steps_per_batch", c.inner_steps_per_batch);
    read_key(doc, "seed", c.seed);
    read_key(doc, "node_seed", c.node_seed);
    read_key(doc, "seq_seed", c.seq_seed);
    read_key(doc, "split_seed", c.split_seed);
    if (doc.contains("ablation")) c.ablation = parse_ablation(doc["ablation"].get<std::string>());
    return c;
}

TrainConfig load_config_file(const std::filesystem::path& path, TrainConfig base) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return config_from_json(doc, base);
}

json metrics_to_json(const MetricsReport& m) {
    return json{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

std::string serialize_checkpoint(const Checkpoint& ck) {
    json params = json::object();
    for (const auto& [name, e] : ck.params.entries())
        params[name] = json{{"rows", e.value.rows()}, {"cols", e.value.cols()}, {"data", e.value.storage()}};
    json doc{
        {"format", kFormat},
        {"config", config_to_json(ck.config)},
        {"vectorizers",
         {{"mode", "hash"}, {"dim", ck.config.d}, {"node_seed", ck.config.node_seed},
          {"seq_seed", ck.config.seq_seed}}},
        {"image_dim", ck.image_dim},
        {"best_epoch", ck.best_epoch},
        {"best_val_f1", ck.best_val_f1},
        {"train_metrics", metrics_to_json(ck.train_metrics)},
        {"params", params},
    };
    return doc.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("checkpoint: ") + e.what());
    }
    if (doc.value("format", "") != kFormat) throw std::runtime_error("checkpoint: unsupported format");
    Checkpoint ck;
    ck.config = config_from_json(doc.at("config"));
    ck.image_dim = doc.at("image_dim").get<std::size_t>();
    ck.best_epoch = doc.at("best_epoch").get<std::size_t>();
    ck.best_val_f1 = doc.at("best_val_f1").get<double>();
    const auto& tm = doc.at("train_metrics");
    ck.train_metrics = {tm.at("accuracy").get<double>(), tm.at("precision").get<double>(),
                        tm.at("recall").get<double>(), tm.at("f1").get<double>()};
    for (const auto& [name, p] : doc.at("params").items()) {
        ck.params.add(name, Matrix(p.at("rows").get<std::size_t>(), p.at("cols").get<std::size_t>(),
                                   p.at("data").get<std::vector<double>>()));
    }
    return ck;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, serialize_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_file(path));
}

}  // namespace bnews
