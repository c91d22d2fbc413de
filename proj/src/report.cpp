// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/report.hpp"

namespace proxyisa {

using nlohmann::json;

json class_state_to_json(const ClassState& state) {
    json j;
    j["class_id"] = state.class_id;
    j["n"] = state.n;
    j["e_n"] = state.e_n;
    j["nu"] = state.nu;
    j["sigma"] = state.sigma;
    if (state.active()) {
        j["s_avg"] = *state.s_avg;
        j["s_learned"] = state.s_learned;
        j["eta"] = state.eta;
    } else {
        j["s_avg"] = nullptr;
        j["s_learned"] = nullptr;
        j["eta"] = nullptr;
    }
    return j;
}

ClassState class_state_from_json(const json& j) {
    ClassState s;
    s.class_id = j.at("class_id").get<int>();
    s.n = j.at("n").get<long long>();
    s.e_n = j.at("e_n").get<double>();
    s.nu = j.at("nu").get<double>();
    s.sigma = j.at("sigma").get<double>();
    if (!j.at("s_avg").is_null()) {
        s.s_avg = j.at("s_avg").get<double>();
        s.s_learned = j.at("s_learned").get<double>();
        s.eta = j.at("eta").get<double>();
    }
    return s;
}

json RunReport::to_json() const {
    json j;
    j["config"] = config_echo;
    j["seed"] = seed;
    json eps = json::array();
    for (const EpochRecord& r : epochs) {
        json e;
        e["epoch"] = r.epoch;
        if (r.mean_loss.has_value()) {
            e["mean_loss"] = *r.mean_loss;
        } else {
            e["mean_loss"] = nullptr;
        }
        e["recall_at"] = {{"1", r.recall_at_1},
                          {"2", r.recall_at_2},
                          {"4", r.recall_at_4},
                          {"8", r.recall_at_8}};
        e["map_at_r"] = r.map_at_r;
        eps.push_back(std::move(e));
    }
    j["epochs"] = std::move(eps);
    json states = json::array();
    for (const ClassState& s : final_states) states.push_back(class_state_to_json(s));
    j["final_states"] = std::move(states);
    j["timings"] = {{"train_seconds", timings.train_seconds},
                    {"eval_seconds", timings.eval_seconds},
                    {"total_seconds", timings.total_seconds}};
    return j;
}

RunReport RunReport::from_json(const json& j) {
    RunReport r;
    r.config_echo = j.at("config");
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const json& e : j.at("epochs")) {
        EpochRecord rec;
        rec.epoch = e.at("epoch").get<int>();
        if (!e.at("mean_loss").is_null()) rec.mean_loss = e.at("mean_loss").get<double>();
        rec.recall_at_1 = e.at("recall_at").at("1").get<double>();
        rec.recall_at_2 = e.at("recall_at").at("2").get<double>();
        rec.recall_at_4 = e.at("recall_at").at("4").get<double>();
        rec.recall_at_8 = e.at("recall_at").at("8").get<double>();
        rec.map_at_r = e.at("map_at_r").get<double>();
        r.epochs.push_back(rec);
    }
    for (const json& s : j.at("final_states")) {
        r.final_states.push_back(class_state_from_json(s));
    }
    r.timings.train_seconds = j.at("timings").at("train_seconds").get<double>();
    r.timings.eval_seconds = j.at("timings").at("eval_seconds").get<double>();
    r.timings.total_seconds = j.at("timings").at("total_seconds").get<double>();
    return r;
}

json report_without_timings(json report) {
    report["timings"] = {{"train_seconds", 0.0},
                         {"eval_seconds", 0.0},
                         {"total_seconds", 0.0}};
    return report;
}

}  // namespace proxyisa
