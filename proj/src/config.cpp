// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace proxyisa {

using nlohmann::json;

std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::proxy_anchor: return "proxy_anchor";
        case LossKind::proxy_isa: return "proxy_isa";
        case LossKind::normalized_softmax: return "normalized_softmax";
    }
    return "proxy_isa";
}

LossKind loss_from_string(const std::string& s) {
    if (s == "proxy_anchor") return LossKind::proxy_anchor;
    if (s == "proxy_isa") return LossKind::proxy_isa;
    if (s == "normalized_softmax") return LossKind::normalized_softmax;
    throw ConfigError("unknown loss '" + s + "'");
}

std::string to_string(ScheduleUnit u) {
    return u == ScheduleUnit::epoch ? "epoch" : "step";
}

ScheduleUnit schedule_unit_from_string(const std::string& s) {
    if (s == "epoch") return ScheduleUnit::epoch;
    if (s == "step") return ScheduleUnit::step;
    throw ConfigError("unknown schedule_unit '" + s + "'");
}

std::string to_string(DataSource d) {
    return d == DataSource::synthetic ? "synthetic" : "files";
}

DataSource data_source_from_string(const std::string& s) {
    if (s == "synthetic") return DataSource::synthetic;
    if (s == "files") return DataSource::files;
    throw ConfigError("unknown data source '" + s + "'");
}

bool ExperimentConfig::memory_active(int epoch, long long step) const {
    return schedule_unit == ScheduleUnit::epoch ? epoch >= memory_on_epoch
                                                : step >= memory_on_step;
}

bool ExperimentConfig::filter_active(int epoch, long long step) const {
    return schedule_unit == ScheduleUnit::epoch ? epoch >= filter_on_epoch
                                                : step >= filter_on_step;
}

void ExperimentConfig::validate(bool for_compare) const {
    loss_hyper.validate();
    hardness.validate();
    opt_hyper.validate();
    if (epochs < 0) throw ConfigError("epochs must be >= 0");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
    if (memory_capacity == 0) throw ConfigError("memory_capacity must be >= 1");
    if (batch_size == 0 || instances_per_class == 0 ||
        batch_size % instances_per_class != 0) {
        throw ConfigError("batch_size must be a positive multiple of instances_per_class");
    }
    if (!(lr_model >= 0.0) || !(lr_proxies >= 0.0)) {
        throw ConfigError("learning rates must be non-negative");
    }
    if (memory_on_epoch < 1 || filter_on_epoch < 1) {
        throw ConfigError("schedule epochs must be >= 1");
    }
    if (filter_on_epoch < memory_on_epoch) {
        throw ConfigError("filter_on_epoch must be >= memory_on_epoch");
    }
    if (memory_on_step < 1 || filter_on_step < memory_on_step) {
        throw ConfigError("step gates need 1 <= memory_on_step <= filter_on_step");
    }
    if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
    if (freeze_model_epochs < 0) throw ConfigError("freeze_model_epochs must be >= 0");
    if (data_source == DataSource::synthetic) {
        synthetic.validate();
        if (synthetic.train_classes < 1) {
            throw ConfigError("synthetic data needs at least one training class");
        }
        if (model_mode == ModelMode::linear_projection &&
            synthetic.train_classes >= synthetic.num_classes) {
            throw ConfigError("linear-model runs need a disjoint eval split");
        }
    } else {
        if (train_path.empty()) throw ConfigError("files mode requires train_path");
        const bool single = !eval_path.empty();
        const bool split = !eval_query_path.empty() && !eval_gallery_path.empty();
        if (single == split) {
            throw ConfigError(
                "files mode requires either eval_path or both "
                "eval_query_path and eval_gallery_path");
        }
    }
    if (for_compare) {
        if (compare_losses.size() < 2) {
            throw ConfigError("compare needs at least two entries in 'losses'");
        }
        if (compare_seeds.empty()) {
            throw ConfigError("compare needs at least one entry in 'seeds'");
        }
    }
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "loss", "seed", "epochs", "alpha", "delta", "temperature",
        "volume_bound", "hardness_scale", "sensitivity", "margin", "tau",
        "positive_penalty", "negative_penalty", "memory_capacity", "batch_size",
        "instances_per_class", "lr_model", "lr_proxies", "optimizer",
        "adam_beta1", "adam_beta2", "adam_epsilon", "memory_on_epoch",
        "filter_on_epoch", "schedule_unit", "memory_on_step", "filter_on_step",
        "model", "embedding_dim", "freeze_model_epochs", "data", "num_classes",
        "train_classes", "input_dim", "samples_per_class", "spread_min",
        "spread_max", "outlier_fraction", "outlier_spread_multiplier",
        "train_path", "eval_path", "eval_query_path", "eval_gallery_path",
        "losses", "seeds"};
    return keys;
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::string get_string_or(const json& j, const std::string& key, std::string fallback) {
    return get_or<std::string>(j, key, std::move(fallback));
}

void require_key(const json& j, const std::string& key) {
    if (!j.contains(key)) {
        throw ConfigError("missing required config key '" + key + "'");
    }
}

}  // namespace

ExperimentConfig parse_config(const json& j, bool for_compare) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!known_keys().count(item.key())) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }
    ExperimentConfig cfg;
    require_key(j, "epochs");
    if (for_compare) {
        require_key(j, "losses");
        require_key(j, "seeds");
        for (const auto& l : get_or<std::vector<std::string>>(j, "losses", {})) {
            cfg.compare_losses.push_back(loss_from_string(l));
        }
        cfg.compare_seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
        cfg.loss = cfg.compare_losses.empty() ? cfg.loss : cfg.compare_losses.front();
        cfg.seed = cfg.compare_seeds.empty() ? 0 : cfg.compare_seeds.front();
    } else {
        require_key(j, "loss");
        require_key(j, "seed");
        cfg.loss = loss_from_string(j.at("loss").get<std::string>());
        cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    }
    cfg.epochs = get_or<int>(j, "epochs", 0);
    cfg.loss_hyper.alpha = get_or<double>(j, "alpha", cfg.loss_hyper.alpha);
    cfg.loss_hyper.delta = get_or<double>(j, "delta", cfg.loss_hyper.delta);
    cfg.temperature = get_or<double>(j, "temperature", cfg.temperature);
    cfg.hardness.volume_bound = get_or<double>(j, "volume_bound", cfg.hardness.volume_bound);
    cfg.hardness.hardness_scale =
        get_or<double>(j, "hardness_scale", cfg.hardness.hardness_scale);
    cfg.hardness.sensitivity = get_or<double>(j, "sensitivity", cfg.hardness.sensitivity);
    cfg.hardness.margin = get_or<double>(j, "margin", cfg.hardness.margin);
    cfg.hardness.tau = get_or<double>(j, "tau", cfg.hardness.tau);
    cfg.hardness.positive_penalty = positive_penalty_from_string(
        get_string_or(j, "positive_penalty", to_string(cfg.hardness.positive_penalty)));
    cfg.hardness.negative_penalty = negative_penalty_from_string(
        get_string_or(j, "negative_penalty", to_string(cfg.hardness.negative_penalty)));
    cfg.memory_capacity = get_or<std::size_t>(j, "memory_capacity", cfg.memory_capacity);
    cfg.batch_size = get_or<std::size_t>(j, "batch_size", cfg.batch_size);
    cfg.instances_per_class =
        get_or<std::size_t>(j, "instances_per_class", cfg.instances_per_class);
    cfg.lr_model = get_or<double>(j, "lr_model", cfg.lr_model);
    cfg.lr_proxies = get_or<double>(j, "lr_proxies", cfg.lr_proxies);
    cfg.optimizer =
        optimizer_from_string(get_string_or(j, "optimizer", to_string(cfg.optimizer)));
    cfg.opt_hyper.beta1 = get_or<double>(j, "adam_beta1", cfg.opt_hyper.beta1);
    cfg.opt_hyper.beta2 = get_or<double>(j, "adam_beta2", cfg.opt_hyper.beta2);
    cfg.opt_hyper.epsilon = get_or<double>(j, "adam_epsilon", cfg.opt_hyper.epsilon);
    cfg.memory_on_epoch = get_or<int>(j, "memory_on_epoch", cfg.memory_on_epoch);
    cfg.filter_on_epoch = get_or<int>(j, "filter_on_epoch", cfg.filter_on_epoch);
    cfg.schedule_unit = schedule_unit_from_string(
        get_string_or(j, "schedule_unit", to_string(cfg.schedule_unit)));
    cfg.memory_on_step = get_or<long long>(j, "memory_on_step", cfg.memory_on_step);
    cfg.filter_on_step = get_or<long long>(j, "filter_on_step", cfg.filter_on_step);
    cfg.model_mode =
        model_mode_from_string(get_string_or(j, "model", to_string(cfg.model_mode)));
    cfg.embedding_dim = get_or<int>(j, "embedding_dim", cfg.embedding_dim);
    cfg.freeze_model_epochs =
        get_or<int>(j, "freeze_model_epochs", cfg.freeze_model_epochs);
    cfg.data_source =
        data_source_from_string(get_string_or(j, "data", to_string(cfg.data_source)));
    cfg.synthetic.num_classes = get_or<int>(j, "num_classes", 40);
    cfg.synthetic.train_classes = get_or<int>(j, "train_classes", 20);
    cfg.synthetic.dim = get_or<int>(j, "input_dim", 32);
    cfg.synthetic.samples_per_class = get_or<int>(j, "samples_per_class", 20);
    cfg.synthetic.spread_min = get_or<double>(j, "spread_min", 0.15);
    cfg.synthetic.spread_max = get_or<double>(j, "spread_max", 0.45);
    cfg.synthetic.outlier_fraction = get_or<double>(j, "outlier_fraction", 0.1);
    cfg.synthetic.outlier_spread_multiplier =
        get_or<double>(j, "outlier_spread_multiplier", 3.0);
    cfg.synthetic.seed = cfg.seed;
    cfg.train_path = get_string_or(j, "train_path", "");
    cfg.eval_path = get_string_or(j, "eval_path", "");
    cfg.eval_query_path = get_string_or(j, "eval_query_path", "");
    cfg.eval_gallery_path = get_string_or(j, "eval_gallery_path", "");
    cfg.validate(for_compare);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path, bool for_compare) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("config '" + path + "': " + e.what());
    }
    return parse_config(j, for_compare);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["loss"] = to_string(cfg.loss);
    j["seed"] = cfg.seed;
    j["epochs"] = cfg.epochs;
    j["alpha"] = cfg.loss_hyper.alpha;
    j["delta"] = cfg.loss_hyper.delta;
    j["temperature"] = cfg.temperature;
    j["volume_bound"] = cfg.hardness.volume_bound;
    j["hardness_scale"] = cfg.hardness.hardness_scale;
    j["sensitivity"] = cfg.hardness.sensitivity;
    j["margin"] = cfg.hardness.margin;
    j["tau"] = cfg.hardness.tau;
    j["positive_penalty"] = to_string(cfg.hardness.positive_penalty);
    j["negative_penalty"] = to_string(cfg.hardness.negative_penalty);
    j["memory_capacity"] = cfg.memory_capacity;
    j["batch_size"] = cfg.batch_size;
    j["instances_per_class"] = cfg.instances_per_class;
    j["lr_model"] = cfg.lr_model;
    j["lr_proxies"] = cfg.lr_proxies;
    j["optimizer"] = to_string(cfg.optimizer);
    j["adam_beta1"] = cfg.opt_hyper.beta1;
    j["adam_beta2"] = cfg.opt_hyper.beta2;
    j["adam_epsilon"] = cfg.opt_hyper.epsilon;
    j["memory_on_epoch"] = cfg.memory_on_epoch;
    j["filter_on_epoch"] = cfg.filter_on_epoch;
    j["schedule_unit"] = to_string(cfg.schedule_unit);
    j["memory_on_step"] = cfg.memory_on_step;
    j["filter_on_step"] = cfg.filter_on_step;
    j["model"] = to_string(cfg.model_mode);
    j["embedding_dim"] = cfg.embedding_dim;
    j["freeze_model_epochs"] = cfg.freeze_model_epochs;
    j["data"] = to_string(cfg.data_source);
    j["num_classes"] = cfg.synthetic.num_classes;
    j["train_classes"] = cfg.synthetic.train_classes;
    j["input_dim"] = cfg.synthetic.dim;
    j["samples_per_class"] = cfg.synthetic.samples_per_class;
    j["spread_min"] = cfg.synthetic.spread_min;
    j["spread_max"] = cfg.synthetic.spread_max;
    j["outlier_fraction"] = cfg.synthetic.outlier_fraction;
    j["outlier_spread_multiplier"] = cfg.synthetic.outlier_spread_multiplier;
    j["train_path"] = cfg.train_path;
    j["eval_path"] = cfg.eval_path;
    j["eval_query_path"] = cfg.eval_query_path;
    j["eval_gallery_path"] = cfg.eval_gallery_path;
    return j;
}

Dataset build_dataset(const ExperimentConfig& cfg) {
    if (cfg.data_source == DataSource::synthetic) {
        SyntheticSpec spec = cfg.synthetic;
        spec.seed = cfg.seed;
        return generate_synthetic(spec);
    }
    if (!cfg.eval_path.empty()) {
        return dataset_from_files(cfg.train_path, cfg.eval_path);
    }
    Dataset base = dataset_from_files(cfg.train_path, cfg.eval_query_path);
    // Append the gallery as a separate eval block.
    const EmbeddingFile gallery = load_embedding_file(cfg.eval_gallery_path);
    if (gallery.dim != static_cast<int>(base.features.cols)) {
        throw DimensionMismatchError("gallery dim differs from train/query dim");
    }
    Dataset out;
    out.features = Matrix(base.features.rows + gallery.features.rows, base.features.cols);
    std::copy(base.features.data.begin(), base.features.data.end(),
              out.features.data.begin());
    std::copy(gallery.features.data.begin(), gallery.features.data.end(),
              out.features.data.begin() +
                  static_cast<std::ptrdiff_t>(base.features.data.size()));
    out.labels = base.labels;
    out.labels.insert(out.labels.end(), gallery.labels.begin(), gallery.labels.end());
    out.train_indices = base.train_indices;
    out.eval_query_indices = base.eval_indices;
    for (std::size_t i = 0; i < gallery.features.rows; ++i) {
        out.eval_gallery_indices.push_back(base.features.rows + i);
    }
    out.train_class_ids = base.train_class_ids;
    out.eval_class_ids = base.eval_class_ids;
    for (int c : gallery.labels) {
        if (std::find(out.eval_class_ids.begin(), out.eval_class_ids.end(), c) ==
            out.eval_class_ids.end()) {
            out.eval_class_ids.push_back(c);
        }
    }
    std::sort(out.eval_class_ids.begin(), out.eval_class_ids.end());
    out.validate();
    return out;
}

}  // namespace proxyisa
