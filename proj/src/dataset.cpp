// Copyright (c) 2026 the proxyisa authors
// SPDX-License-Identifier: Apache-2.0
#include "proxyisa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "proxyisa/embedding.hpp"
#include "proxyisa/kernels.hpp"
#include "proxyisa/rng.hpp"

namespace proxyisa {

void SyntheticSpec::validate() const {
    if (num_classes < 1) throw ConfigError("num_classes must be >= 1");
    if (train_classes < 0 || train_classes > num_classes) {
        throw ConfigError("train_classes must lie in [0, num_classes]");
    }
    if (dim < 1) throw ConfigError("input dim must be >= 1");
    if (samples_per_class < 1) throw ConfigError("samples_per_class must be >= 1");
    if (!(spread_min > 0.0) || !(spread_max >= spread_min)) {
        throw ConfigError("spreads must satisfy 0 < spread_min <= spread_max");
    }
    if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
        throw ConfigError("outlier_fraction must lie in [0, 1)");
    }
    if (!(outlier_spread_multiplier >= 1.0)) {
        throw ConfigError("outlier_spread_multiplier must be >= 1");
    }
}

void Dataset::validate() const {
    if (features.rows != labels.size()) {
        throw DimensionMismatchError("dataset: feature rows vs labels");
    }
    std::set<int> train(train_class_ids.begin(), train_class_ids.end());
    for (int c : eval_class_ids) {
        if (train.count(c)) {
            throw ConfigError("dataset: class " + std::to_string(c) +
                              " appears in both splits");
        }
    }
}

namespace {

Vector random_unit(RandomStream& rng, int dim) {
    Vector v(dim);
    for (double& x : v) x = rng.normal();
    l2_normalize_in_place(v);
    return v;
}

double angular_distance(const Vector& a, const Vector& b) {
    const double d = kern::dot(a.data(), b.data(), a.size());
    return std::acos(std::clamp(d, -1.0, 1.0));
}

// Spread for the j-th class of a split with `count` classes.
double split_spread(const SyntheticSpec& spec, int j, int count) {
    if (count <= 1) return spec.spread_max;
    return spec.spread_min +
           (spec.spread_max - spec.spread_min) * static_cast<double>(j) /
               static_cast<double>(count - 1);
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    RandomStream rng = RandomStream::derive(spec.seed, "data");

    // Means are rejection-resampled until pairwise separated by at least the
    // largest spread, so clusters cannot collapse onto each other.
    constexpr int kRetries = 256;
    std::vector<Vector> means;
    means.reserve(spec.num_classes);
    for (int c = 0; c < spec.num_classes; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < kRetries && !placed; ++attempt) {
            Vector candidate = random_unit(rng, spec.dim);
            placed = true;
            for (const Vector& m : means) {
                if (angular_distance(candidate, m) < spec.spread_max) {
                    placed = false;
                    break;
                }
            }
            if (placed) means.push_back(std::move(candidate));
        }
        if (!placed) {
            throw InfeasibleSeparationError(
                "could not separate " + std::to_string(spec.num_classes) +
                " class means in " + std::to_string(spec.dim) + " dimensions");
        }
    }

    const int eval_classes = spec.num_classes - spec.train_classes;
    const auto outliers_per_class = static_cast<int>(std::lround(
        spec.outlier_fraction * static_cast<double>(spec.samples_per_class)));

    Dataset out;
    out.features = Matrix(static_cast<std::size_t>(spec.num_classes) *
                              static_cast<std::size_t>(spec.samples_per_class),
                          spec.dim);
    out.labels.resize(out.features.rows);

    std::size_t row = 0;
    for (int c = 0; c < spec.num_classes; ++c) {
        const bool train = c < spec.train_classes;
        const int within = train ? c : c - spec.train_classes;
        const double spread =
            split_spread(spec, within, train ? spec.train_classes : eval_classes);
        for (int s = 0; s < spec.samples_per_class; ++s, ++row) {
            const bool outlier = s >= spec.samples_per_class - outliers_per_class;
            const double scale = spread * (outlier ? spec.outlier_spread_multiplier : 1.0);
            auto feature = out.features.row(row);
            for (std::size_t j = 0; j < feature.size(); ++j) {
                feature[j] = means[c][j] + scale * rng.normal();
            }
            l2_normalize_in_place(feature);
            out.labels[row] = c + 1;
            (train ? out.train_indices : out.eval_indices).push_back(row);
        }
        (train ? out.train_class_ids : out.eval_class_ids).push_back(c + 1);
    }
    out.validate();
    return out;
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& what) {
    throw ParseError(path + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

EmbeddingFile load_embedding_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");

    EmbeddingFile out;
    std::string line;
    std::size_t line_no = 0;
    bool have_dim = false;
    std::vector<double> sample_values;
    std::vector<double> proxy_values;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!have_dim) {
            if (line.rfind("dim=", 0) != 0) parse_fail(path, line_no, "expected dim=<d>");
            try {
                out.dim = std::stoi(line.substr(4));
            } catch (const std::exception&) {
                parse_fail(path, line_no, "bad dimension value");
            }
            if (out.dim < 1) parse_fail(path, line_no, "dimension must be >= 1");
            have_dim = true;
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (static_cast<int>(fields.size()) != out.dim + 1) {
            parse_fail(path, line_no,
                       "expected " + std::to_string(out.dim + 1) + " fields, got " +
                           std::to_string(fields.size()));
        }
        const bool proxy_row = fields[0].rfind("proxy:", 0) == 0;
        const std::string label_text = proxy_row ? fields[0].substr(6) : fields[0];
        int label = 0;
        try {
            std::size_t used = 0;
            label = std::stoi(label_text, &used);
            if (used != label_text.size()) throw std::invalid_argument(label_text);
        } catch (const std::exception&) {
            parse_fail(path, line_no, "bad label '" + fields[0] + "'");
        }
        auto& values = proxy_row ? proxy_values : sample_values;
        for (int j = 1; j <= out.dim; ++j) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(fields[j], &used));
                if (used != fields[j].size()) throw std::invalid_argument(fields[j]);
            } catch (const std::exception&) {
                parse_fail(path, line_no, "bad value '" + fields[j] + "'");
            }
        }
        if (proxy_row) {
            out.proxy_classes.push_back(label);
        } else {
            out.labels.push_back(label);
        }
    }
    if (!have_dim) throw ParseError(path + ": missing dim=<d> header");

    out.features = Matrix(out.labels.size(), out.dim);
    out.features.data = std::move(sample_values);
    out.proxies = Matrix(out.proxy_classes.size(), out.dim);
    out.proxies.data = std::move(proxy_values);
    return out;
}

void save_embedding_file(const std::string& path, const Matrix& features,
                         const std::vector<int>& labels, const Matrix* proxies,
                         const std::vector<int>* proxy_classes) {
    if (features.rows != labels.size()) {
        throw DimensionMismatchError("save: feature rows vs labels");
    }
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot open '" + path + "' for writing");
    outf.precision(17);  // round-trips doubles exactly
    outf << "dim=" << features.cols << "\n";
    for (std::size_t i = 0; i < features.rows; ++i) {
        outf << labels[i];
        for (double v : features.row(i)) outf << ',' << v;
        outf << "\n";
    }
    if (proxies != nullptr) {
        if (proxy_classes == nullptr || proxies->rows != proxy_classes->size() ||
            proxies->cols != features.cols) {
            throw DimensionMismatchError("save: proxy rows vs proxy classes");
        }
        for (std::size_t c = 0; c < proxies->rows; ++c) {
            outf << "proxy:" << (*proxy_classes)[c];
            for (double v : proxies->row(c)) outf << ',' << v;
            outf << "\n";
        }
    }
    if (!outf) throw IoError("failed writing '" + path + "'");
}

Dataset dataset_from_files(const std::string& train_path, const std::string& eval_path) {
    const EmbeddingFile train = load_embedding_file(train_path);
    const EmbeddingFile eval = load_embedding_file(eval_path);
    if (train.dim != eval.dim) {
        throw DimensionMismatchError("train and eval files disagree on dim");
    }
    Dataset out;
    out.features = Matrix(train.features.rows + eval.features.rows, train.dim);
    std::copy(train.features.data.begin(), train.features.data.end(),
              out.features.data.begin());
    std::copy(eval.features.data.begin(), eval.features.data.end(),
              out.features.data.begin() + static_cast<std::ptrdiff_t>(train.features.data.size()));
    out.labels = train.labels;
    out.labels.insert(out.labels.end(), eval.labels.begin(), eval.labels.end());
    for (std::size_t i = 0; i < train.features.rows; ++i) out.train_indices.push_back(i);
    for (std::size_t i = 0; i < eval.features.rows; ++i) {
        out.eval_indices.push_back(train.features.rows + i);
    }
    std::set<int> train_classes(train.labels.begin(), train.labels.end());
    std::set<int> eval_classes(eval.labels.begin(), eval.labels.end());
    out.train_class_ids.assign(train_classes.begin(), train_classes.end());
    out.eval_class_ids.assign(eval_classes.begin(), eval_classes.end());
    out.validate();
    return out;
}

}  // namespace proxyisa
