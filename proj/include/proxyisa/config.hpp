// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxyisa/dataset.hpp"
#include "proxyisa/hardness.hpp"
#include "proxyisa/losses.hpp"
#include "proxyisa/model.hpp"
#include "proxyisa/optimizer.hpp"

namespace proxyisa {

enum class LossKind { proxy_anchor, proxy_isa, normalized_softmax };
enum class ScheduleUnit { epoch, step };
enum class DataSource { synthetic, files };

std::string to_string(LossKind k);
LossKind loss_from_string(const std::string& s);
std::string to_string(ScheduleUnit u);
ScheduleUnit schedule_unit_from_string(const std::string& s);
std::string to_string(DataSource d);
DataSource data_source_from_string(const std::string& s);

// Full hyper-parameter and schedule record for one reproducible run. Config
// files are flat JSON over a closed key set: unknown keys are hard errors so
// a typo cannot silently fall back to a default.
struct ExperimentConfig {
    LossKind loss = LossKind::proxy_isa;
    std::uint64_t seed = 0;
    int epochs = 0;

    LossHyper loss_hyper;       // alpha, delta
    double temperature = 0.1;   // normalized_softmax only
    HardnessHyper hardness;     // V, h, k, lambda, tau, penalty variants

    std::size_t memory_capacity = 256;
    std::size_t batch_size = 32;
    std::size_t instances_per_class = 4;

    double lr_model = 1e-4;
    double lr_proxies = 1e-4;
    OptimizerKind optimizer = OptimizerKind::adam;
    OptimizerHyper opt_hyper;

    // The memory queue starts filling at memory_on, the outlier filter and
    // positive weighting one gate later; both epoch- and step-indexed gates
    // exist, selected by schedule_unit.
    int memory_on_epoch = 2;
    int filter_on_epoch = 3;
    ScheduleUnit schedule_unit = ScheduleUnit::epoch;
    long long memory_on_step = 1;
    long long filter_on_step = 1;

    ModelMode model_mode = ModelMode::linear_projection;
    int embedding_dim = 32;
    int freeze_model_epochs = 0;

    DataSource data_source = DataSource::synthetic;
    SyntheticSpec synthetic;  // synthetic.seed is driven by `seed`
    std::string train_path;
    std::string eval_path;
    std::string eval_query_path;
    std::string eval_gallery_path;

    // cmd_compare grid; empty outside compare mode.
    std::vector<LossKind> compare_losses;
    std::vector<std::uint64_t> compare_seeds;

    bool memory_active(int epoch, long long step) const;
    bool filter_active(int epoch, long long step) const;

    void validate(bool for_compare) const;
};

// Strict parse: unknown keys and missing required keys raise ConfigError
// naming the key. Train mode requires loss/seed/epochs; compare mode requires
// losses/seeds/epochs.
ExperimentConfig parse_config(const nlohmann::json& j, bool for_compare);
ExperimentConfig load_config_file(const std::string& path, bool for_compare);

// Every train-mode key materialized with its resolved value; feeding the echo
// back into parse_config reproduces the run.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Builds the dataset the config describes (synthetic or from files).
Dataset build_dataset(const ExperimentConfig& cfg);

}  // namespace proxyisa
