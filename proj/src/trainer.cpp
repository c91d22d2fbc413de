// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "proxyisa/embedding.hpp"
#include "proxyisa/metrics.hpp"
#include "proxyisa/rng.hpp"
#include "proxyisa/sampler.hpp"

namespace proxyisa {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    m.data = j.at("data").get<std::vector<double>>();
    if (m.data.size() != m.rows * m.cols) {
        throw ParseError("checkpoint matrix: data length vs shape");
    }
    return m;
}

json optimizer_to_json(const Optimizer& opt) {
    return json{{"m", opt.first_moment()},
                {"v", opt.second_moment()},
                {"t", opt.steps_taken()}};
}

void optimizer_from_json(Optimizer& opt, const json& j) {
    opt.restore_state(j.at("m").get<std::vector<double>>(),
                      j.at("v").get<std::vector<double>>(),
                      j.at("t").get<long long>());
}

EmbeddingModel build_model(const ExperimentConfig& cfg, std::size_t pool_size,
                           std::size_t input_dim) {
    if (cfg.model_mode == ModelMode::linear_projection) {
        return EmbeddingModel::linear(static_cast<int>(input_dim), cfg.embedding_dim,
                                      substream_seed(cfg.seed, "init"));
    }
    return EmbeddingModel::table(pool_size, cfg.embedding_dim,
                                 substream_seed(cfg.seed, "init"));
}

double elapsed_seconds(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
        .count();
}

}  // namespace

Trainer::Trainer(const ExperimentConfig& cfg, Dataset dataset)
    : cfg_(cfg),
      data_(std::move(dataset)),
      model_(build_model(cfg, data_.train_indices.size(), data_.features.cols)),
      proxies_(init_proxies(static_cast<int>(data_.train_class_ids.size()),
                            cfg.embedding_dim, substream_seed(cfg.seed, "init"))),
      queue_(cfg.memory_capacity),
      opt_model_(cfg.optimizer, cfg.opt_hyper, 0),
      opt_proxies_(cfg.optimizer, cfg.opt_hyper, 0) {
    cfg_.validate(false);
    data_.validate();
    if (data_.train_indices.empty()) {
        throw ConfigError("training requires a non-empty train split");
    }

    // Train labels are remapped onto {1..C} in sorted class-id order.
    num_train_classes_ = static_cast<int>(data_.train_class_ids.size());
    pool_rows_ = data_.train_indices;
    train_labels_.reserve(pool_rows_.size());
    for (std::size_t row : pool_rows_) {
        const auto it = std::lower_bound(data_.train_class_ids.begin(),
                                         data_.train_class_ids.end(), data_.labels[row]);
        train_labels_.push_back(
            static_cast<int>(it - data_.train_class_ids.begin()) + 1);
    }

    states_.reserve(num_train_classes_);
    for (int c = 1; c <= num_train_classes_; ++c) {
        ClassState st;
        st.class_id = c;
        states_.push_back(refresh_state(st, 0, std::nullopt, cfg_.hardness));
    }

    opt_model_ = Optimizer(cfg_.optimizer, cfg_.opt_hyper, model_.params().data.size());
    opt_proxies_ = Optimizer(cfg_.optimizer, cfg_.opt_hyper, proxies_.rows.data.size());
}

void Trainer::check_parameters_finite() const {
    if (!all_finite(model_.params()) || !all_finite(proxies_.rows)) {
        throw NumericalDivergenceError("non-finite parameters after update");
    }
    for (std::size_t c = 0; c < proxies_.rows.rows; ++c) {
        if (vector_norm(proxies_.rows.row(c)) < kNormFloor) {
            throw NumericalDivergenceError("proxy " + std::to_string(c + 1) +
                                           " collapsed to zero norm");
        }
    }
}

IterationTrace Trainer::train_iteration(const std::vector<std::size_t>& batch_positions,
                                        int epoch) {
    const std::size_t m = batch_positions.size();
    if (m == 0) throw EmptyBatchError("empty training batch");
    const std::size_t d = static_cast<std::size_t>(cfg_.embedding_dim);
    const long long step = global_step_ + 1;

    Matrix raw(m, d);
    EmbeddingBatch batch;
    batch.embeddings = Matrix(m, d);
    batch.labels.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t pos = batch_positions[j];
        model_.forward(data_.features.row(pool_rows_[pos]), pos, raw.row(j),
                       batch.embeddings.row(j));
        batch.labels[j] = train_labels_[pos];
    }

    const Matrix s = similarity_matrix(batch, proxies_.rows);
    std::set<int> present_set(batch.labels.begin(), batch.labels.end());
    const std::vector<int> present(present_set.begin(), present_set.end());

    const bool memory_on = cfg_.memory_active(epoch, step);
    const bool filter_on = cfg_.filter_active(epoch, step);

    // Weights read the state snapshot as of the previous iteration's end; the
    // memory and thresholds are refreshed only after the optimizer step.
    IterationTrace trace;
    trace.outlier_mask.assign(m, false);
    PairWeights weights = unit_pair_weights(m, s.cols);
    if (cfg_.loss == LossKind::proxy_isa) {
        weights = pair_weights(s, batch.labels, states_, cfg_.hardness);
        if (!filter_on) {
            weights.omega_pos = Matrix(m, s.cols, 1.0);
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                const ClassState& st = states_[batch.labels[i] - 1];
                if (st.active() &&
                    is_outlier(s(i, static_cast<std::size_t>(batch.labels[i] - 1)), st)) {
                    trace.outlier_mask[i] = true;
                }
            }
        }
    }

    LossOutput loss;
    switch (cfg_.loss) {
        case LossKind::proxy_anchor:
            loss = proxy_anchor(s, batch.labels, present, cfg_.loss_hyper);
            break;
        case LossKind::proxy_isa:
            loss = proxy_isa(s, batch.labels, present, weights, cfg_.loss_hyper);
            break;
        case LossKind::normalized_softmax:
            loss = normalized_softmax(s, batch.labels, cfg_.temperature);
            break;
    }
    if (!std::isfinite(loss.value)) {
        throw NumericalDivergenceError("loss diverged at epoch " +
                                       std::to_string(epoch) + ", step " +
                                       std::to_string(step));
    }
    trace.loss = loss.value;

    // dL/dS flows through the cosine of both normalization maps into the raw
    // embedding outputs and the raw proxy coordinates.
    const bool model_frozen = epoch <= cfg_.freeze_model_epochs;
    Matrix raw_grad(m, d);
    Matrix proxy_grad(proxies_.rows.rows, d);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < s.cols; ++c) {
            const double g = loss.grad_s(i, c);
            if (g == 0.0) continue;
            cosine_backward_into(raw.row(i), proxies_.rows.row(c), g, raw_grad.row(i),
                                 proxy_grad.row(c));
        }
    }
    if (!model_frozen) {
        Matrix param_grad(model_.params().rows, model_.params().cols);
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t pos = batch_positions[j];
            model_.accumulate_param_grad(data_.features.row(pool_rows_[pos]), pos,
                                         raw_grad.row(j), param_grad);
        }
        opt_model_.step(model_.params().data, param_grad.data, cfg_.lr_model);
    }
    opt_proxies_.step(proxies_.rows.data, proxy_grad.data, cfg_.lr_proxies);
    check_parameters_finite();

    if (memory_on && cfg_.loss == LossKind::proxy_isa) {
        std::vector<long long> added(num_train_classes_ + 1, 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (!trace.outlier_mask[i]) {
                ++trace.enqueued;
                ++added[batch.labels[i]];
            }
        }
        queue_.enqueue_clean(batch, trace.outlier_mask);
        for (int cls : present) {
            states_[cls - 1] = refresh_state(
                states_[cls - 1], states_[cls - 1].n + added[cls],
                class_mean_similarity(queue_, proxies_, cls), cfg_.hardness);
        }
    }

    global_step_ = step;
    return trace;
}

EpochRecord Trainer::evaluate(int epoch) const {
    EpochRecord rec;
    rec.epoch = epoch;

    const std::size_t d = static_cast<std::size_t>(cfg_.embedding_dim);
    const auto embed = [&](const std::vector<std::size_t>& rows, Matrix& out,
                           std::vector<int>& labels) {
        out = Matrix(rows.size(), d);
        labels.resize(rows.size());
        Vector scratch(d);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            model_.forward(data_.features.row(rows[j]), rows[j], scratch, out.row(j));
            labels[j] = data_.labels[rows[j]];
        }
    };

    Matrix queries;
    std::vector<int> qlabels;
    if (cfg_.model_mode == ModelMode::embedding_table) {
        // A free table cannot embed unseen samples; evaluate the train pool.
        queries = Matrix(pool_rows_.size(), d);
        qlabels = train_labels_;
        Vector scratch(d);
        for (std::size_t pos = 0; pos < pool_rows_.size(); ++pos) {
            model_.forward(data_.features.row(pool_rows_[pos]), pos, scratch,
                           queries.row(pos));
        }
    } else if (!data_.eval_query_indices.empty()) {
        Matrix gallery;
        std::vector<int> glabels;
        embed(data_.eval_query_indices, queries, qlabels);
        embed(data_.eval_gallery_indices, gallery, glabels);
        rec.recall_at_1 = recall_at_k(queries, qlabels, gallery, glabels, 1, false);
        rec.recall_at_2 = recall_at_k(queries, qlabels, gallery, glabels, 2, false);
        rec.recall_at_4 = recall_at_k(queries, qlabels, gallery, glabels, 4, false);
        rec.recall_at_8 = recall_at_k(queries, qlabels, gallery, glabels, 8, false);
        rec.map_at_r = map_at_r(queries, qlabels, gallery, glabels, false);
        return rec;
    } else {
        embed(data_.eval_indices, queries, qlabels);
    }
    rec.recall_at_1 = recall_at_k(queries, qlabels, 1);
    rec.recall_at_2 = recall_at_k(queries, qlabels, 2);
    rec.recall_at_4 = recall_at_k(queries, qlabels, 4);
    rec.recall_at_8 = recall_at_k(queries, qlabels, 8);
    rec.map_at_r = map_at_r(queries, qlabels);
    return rec;
}

RunReport Trainer::run() {
    const auto t_start = std::chrono::steady_clock::now();
    RunReport report;
    report.seed = cfg_.seed;
    report.config_echo = config_to_json(cfg_);

    double train_seconds = 0.0;
    double eval_seconds = 0.0;

    if (epochs_completed_ == 0) {
        const auto t_eval = std::chrono::steady_clock::now();
        report.epochs.push_back(evaluate(0));
        eval_seconds += elapsed_seconds(t_eval);
    }
    for (int epoch = epochs_completed_ + 1; epoch <= cfg_.epochs; ++epoch) {
        const auto t_train = std::chrono::steady_clock::now();
        const auto batches =
            balanced_batches(train_labels_, cfg_.batch_size, cfg_.instances_per_class,
                             cfg_.seed, static_cast<std::uint64_t>(epoch));
        double loss_sum = 0.0;
        for (const auto& batch : batches) {
            loss_sum += train_iteration(batch, epoch).loss;
        }
        epochs_completed_ = epoch;
        train_seconds += elapsed_seconds(t_train);

        const auto t_eval = std::chrono::steady_clock::now();
        EpochRecord rec = evaluate(epoch);
        rec.mean_loss = loss_sum / static_cast<double>(batches.size());
        report.epochs.push_back(rec);
        eval_seconds += elapsed_seconds(t_eval);
    }

    report.final_states = states_;
    report.timings.train_seconds = train_seconds;
    report.timings.eval_seconds = eval_seconds;
    report.timings.total_seconds = elapsed_seconds(t_start);
    return report;
}

json Trainer::checkpoint() const {
    json j;
    j["version"] = 1;
    j["config"] = config_to_json(cfg_);
    j["epochs_completed"] = epochs_completed_;
    j["global_step"] = global_step_;
    j["model_mode"] = to_string(model_.mode());
    j["model_params"] = matrix_to_json(model_.params());
    j["proxies"] = matrix_to_json(proxies_.rows);
    j["train_class_ids"] = data_.train_class_ids;
    j["opt_model"] = optimizer_to_json(opt_model_);
    j["opt_proxies"] = optimizer_to_json(opt_proxies_);
    json states = json::array();
    for (const ClassState& s : states_) states.push_back(class_state_to_json(s));
    j["states"] = std::move(states);
    json entries = json::array();
    for (const MemoryQueue::Entry& e : queue_.entries()) {
        entries.push_back(json{{"label", e.label}, {"embedding", e.embedding}});
    }
    j["queue"] = {{"capacity", queue_.capacity()}, {"entries", std::move(entries)}};
    // Sampler streams are re-derived per (seed, epoch), so the RNG position is
    // fully described by the next epoch index.
    j["rng"] = {{"seed", cfg_.seed}, {"next_epoch", epochs_completed_ + 1}};
    return j;
}

Trainer Trainer::restore(const json& ckpt) {
    if (ckpt.at("version").get<int>() != 1) {
        throw ParseError("unsupported checkpoint version");
    }
    const ExperimentConfig cfg = parse_config(ckpt.at("config"), false);
    Trainer t(cfg, build_dataset(cfg));
    t.model_ = EmbeddingModel::from_params(
        model_mode_from_string(ckpt.at("model_mode").get<std::string>()),
        matrix_from_json(ckpt.at("model_params")));
    t.proxies_.rows = matrix_from_json(ckpt.at("proxies"));
    optimizer_from_json(t.opt_model_, ckpt.at("opt_model"));
    optimizer_from_json(t.opt_proxies_, ckpt.at("opt_proxies"));
    t.states_.clear();
    for (const json& s : ckpt.at("states")) {
        t.states_.push_back(class_state_from_json(s));
    }
    std::vector<MemoryQueue::Entry> entries;
    for (const json& e : ckpt.at("queue").at("entries")) {
        entries.push_back(MemoryQueue::Entry{e.at("embedding").get<Vector>(),
                                             e.at("label").get<int>()});
    }
    t.queue_ = MemoryQueue::from_entries(
        ckpt.at("queue").at("capacity").get<std::size_t>(), std::move(entries));
    t.epochs_completed_ = ckpt.at("epochs_completed").get<int>();
    t.global_step_ = ckpt.at("global_step").get<long long>();
    return t;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    return run_experiment(cfg, build_dataset(cfg));
}

RunReport run_experiment(const ExperimentConfig& cfg, Dataset dataset) {
    Trainer trainer(cfg, std::move(dataset));
    return trainer.run();
}

CompareResult run_compare(const ExperimentConfig& base) {
    base.validate(true);
    CompareResult result;
    for (LossKind loss : base.compare_losses) {
        double r1_sum = 0.0, r1_sq = 0.0, map_sum = 0.0, map_sq = 0.0;
        for (std::uint64_t seed : base.compare_seeds) {
            ExperimentConfig cfg = base;
            cfg.loss = loss;
            cfg.seed = seed;
            cfg.synthetic.seed = seed;
            cfg.compare_losses.clear();
            cfg.compare_seeds.clear();
            CompareCell cell{loss, seed, run_experiment(cfg)};
            const EpochRecord& last = cell.report.epochs.back();
            r1_sum += last.recall_at_1;
            r1_sq += last.recall_at_1 * last.recall_at_1;
            map_sum += last.map_at_r;
            map_sq += last.map_at_r * last.map_at_r;
            result.cells.push_back(std::move(cell));
        }
        const double n = static_cast<double>(base.compare_seeds.size());
        CompareSummaryRow row;
        row.loss = loss;
        row.recall1_mean = r1_sum / n;
        row.recall1_std = std::sqrt(std::max(0.0, r1_sq / n - row.recall1_mean * row.recall1_mean));
        row.map_mean = map_sum / n;
        row.map_std = std::sqrt(std::max(0.0, map_sq / n - row.map_mean * row.map_mean));
        result.rows.push_back(row);
    }
    return result;
}

}  // namespace proxyisa
