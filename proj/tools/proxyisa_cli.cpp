// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: train / compare / verify / dump-embeddings.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "proxyisa/config.hpp"
#include "proxyisa/selftest.hpp"
#include "proxyisa/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proxyisa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return j;
}

void write_split_file(const fs::path& path, const Dataset& data,
                      const std::vector<std::size_t>& indices) {
    Matrix features(indices.size(), data.features.cols);
    std::vector<int> labels(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) {
        const auto row = data.features.row(indices[j]);
        std::copy(row.begin(), row.end(), features.row(j).begin());
        labels[j] = data.labels[indices[j]];
    }
    save_embedding_file(path.string(), features, labels);
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg;
    try {
        cfg = load_config_file(config_path, /*for_compare=*/false);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    fs::create_directories(out_dir);

    Dataset dataset = build_dataset(cfg);
    Trainer trainer(cfg, std::move(dataset));
    RunReport report;
    try {
        report = trainer.run();
    } catch (const NumericalDivergenceError& e) {
        const fs::path dump = fs::path(out_dir) / "divergence_dump.json";
        write_json(dump, trainer.checkpoint());
        std::cerr << "run diverged: " << e.what() << "\nstate dump: " << dump.string()
                  << "\n";
        return kExitDivergence;
    }

    write_json(fs::path(out_dir) / "report.json", report.to_json());
    write_json(fs::path(out_dir) / "checkpoint.json", trainer.checkpoint());
    const Dataset& data = trainer.dataset();
    write_split_file(fs::path(out_dir) / "data_train.txt", data, data.train_indices);
    if (!data.eval_indices.empty()) {
        write_split_file(fs::path(out_dir) / "data_eval.txt", data, data.eval_indices);
    }
    std::cout << "report: " << (fs::path(out_dir) / "report.json").string() << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg;
    try {
        cfg = load_config_file(config_path, /*for_compare=*/true);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    const CompareResult result = run_compare(cfg);

    std::printf("%-20s %-22s %-22s\n", "loss", "Recall@1", "MAP@R");
    for (const CompareSummaryRow& row : result.rows) {
        std::printf("%-20s %.4f +- %.4f      %.4f +- %.4f\n",
                    to_string(row.loss).c_str(), row.recall1_mean, row.recall1_std,
                    row.map_mean, row.map_std);
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        json summary = json::array();
        for (const CompareSummaryRow& row : result.rows) {
            summary.push_back(json{{"loss", to_string(row.loss)},
                                   {"recall1_mean", row.recall1_mean},
                                   {"recall1_std", row.recall1_std},
                                   {"map_mean", row.map_mean},
                                   {"map_std", row.map_std}});
        }
        write_json(fs::path(out_dir) / "summary.json", summary);
        for (const CompareCell& cell : result.cells) {
            const std::string name = "report_" + to_string(cell.loss) + "_seed" +
                                     std::to_string(cell.seed) + ".json";
            write_json(fs::path(out_dir) / name, cell.report.to_json());
        }
    }
    return kExitOk;
}

int cmd_dump_embeddings(const std::string& checkpoint_path, const std::string& data_path,
                        const std::string& out_path) {
    const json ckpt = read_json(checkpoint_path);
    const ModelMode mode = model_mode_from_string(ckpt.at("model_mode").get<std::string>());
    Matrix params(ckpt.at("model_params").at("rows").get<std::size_t>(),
                  ckpt.at("model_params").at("cols").get<std::size_t>());
    params.data = ckpt.at("model_params").at("data").get<std::vector<double>>();
    const EmbeddingModel model = EmbeddingModel::from_params(mode, std::move(params));

    Matrix raw_proxies(ckpt.at("proxies").at("rows").get<std::size_t>(),
                       ckpt.at("proxies").at("cols").get<std::size_t>());
    raw_proxies.data = ckpt.at("proxies").at("data").get<std::vector<double>>();
    std::vector<int> proxy_classes =
        ckpt.at("train_class_ids").get<std::vector<int>>();

    const EmbeddingFile data = load_embedding_file(data_path);
    if (mode == ModelMode::embedding_table &&
        data.features.rows != model.params().rows) {
        throw ConfigError("table checkpoint covers " +
                          std::to_string(model.params().rows) +
                          " samples but the data file has " +
                          std::to_string(data.features.rows));
    }

    const std::size_t d = static_cast<std::size_t>(model.embedding_dim());
    Matrix embeddings(data.features.rows, d);
    Vector scratch(d);
    for (std::size_t i = 0; i < data.features.rows; ++i) {
        model.forward(data.features.row(i), i, scratch, embeddings.row(i));
    }
    const Matrix proxy_rows = unit_rows(raw_proxies);
    save_embedding_file(out_path, embeddings, data.labels, &proxy_rows, &proxy_classes);
    std::cout << "wrote " << embeddings.rows << " embeddings and " << proxy_rows.rows
              << " proxies to " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive proxy-based deep metric learning engine"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    auto* train = app.add_subcommand("train", "Run one training experiment");
    train->add_option("--config", config_path, "Experiment config (JSON)")->required();
    train->add_option("--out", out_dir, "Output directory (default: out)");

    std::string cmp_config;
    std::string cmp_out;
    auto* compare = app.add_subcommand("compare", "Run a loss-by-seed comparison grid");
    compare->add_option("--config", cmp_config, "Compare config (JSON)")->required();
    compare->add_option("--out", cmp_out, "Optional directory for reports");

    std::string filter;
    auto* verify = app.add_subcommand("verify", "Run the built-in property suites");
    verify->add_option("--filter", filter, "Run only the named suite");

    std::string ckpt_path, data_path, dump_out;
    auto* dump = app.add_subcommand("dump-embeddings",
                                    "Embed a dataset with a checkpointed model");
    dump->add_option("--checkpoint", ckpt_path, "Checkpoint JSON")->required();
    dump->add_option("--data", data_path, "Input embedding/feature file")->required();
    dump->add_option("--out", dump_out, "Output embedding file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(config_path, out_dir);
        if (compare->parsed()) return cmd_compare(cmp_config, cmp_out);
        if (verify->parsed()) return run_selftests(filter, std::cout);
        if (dump->parsed()) return cmd_dump_embeddings(ckpt_path, data_path, dump_out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
