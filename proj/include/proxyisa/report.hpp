// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "proxyisa/hardness.hpp"

namespace proxyisa {

struct EpochRecord {
    int epoch = 0;
    std::optional<double> mean_loss;  // absent for the untrained record
    double recall_at_1 = 0.0;
    double recall_at_2 = 0.0;
    double recall_at_4 = 0.0;
    double recall_at_8 = 0.0;
    double map_at_r = 0.0;
};

struct RunTimings {
    double train_seconds = 0.0;
    double eval_seconds = 0.0;
    double total_seconds = 0.0;
};

// Everything one run produced: the resolved config, per-epoch loss and
// retrieval metrics, the final per-class learning states, and wall-clock
// timings. Serializes losslessly to JSON; the config echo reproduces the run.
struct RunReport {
    nlohmann::json config_echo;
    std::vector<EpochRecord> epochs;
    std::vector<ClassState> final_states;
    std::uint64_t seed = 0;
    RunTimings timings;

    nlohmann::json to_json() const;
    static RunReport from_json(const nlohmann::json& j);
};

nlohmann::json class_state_to_json(const ClassState& state);
ClassState class_state_from_json(const nlohmann::json& j);

// Copy with the wall-clock timings zeroed; every other field of a run is a
// pure function of (config, seed), so this is the comparable view.
nlohmann::json report_without_timings(nlohmann::json report);

}  // namespace proxyisa
