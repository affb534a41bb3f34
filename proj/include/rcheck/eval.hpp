// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcheck/errors.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/scoring.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

struct PairRecord {
    std::string pair_id;
    std::string real_image_id;
    std::string weird_image_id;
};

inline void to_json(json& j, const PairRecord& p) {
    j = json{{"pair_id", p.pair_id},
             {"real_image_id", p.real_image_id},
             {"weird_image_id", p.weird_image_id}};
}

inline void from_json(const json& j, PairRecord& p) {
    j.at("pair_id").get_to(p.pair_id);
    j.at("real_image_id").get_to(p.real_image_id);
    j.at("weird_image_id").get_to(p.weird_image_id);
}

inline std::vector<PairRecord> load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::input, "pairs file not readable: " + path.string());
    std::vector<PairRecord> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(errc::input,
                  "pairs file " + path.string() + ": unparseable line " + std::to_string(line_no));
        auto p = j.get<PairRecord>();
        if (p.real_image_id == p.weird_image_id)
            raise(errc::input, "pair " + p.pair_id + " references the same image twice");
        pairs.push_back(std::move(p));
    }
    return pairs;
}

inline std::vector<double> default_grid(double lo, double hi, double step) {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double v = lo + step * k;
        if (v > hi + 1e-9) break;
        grid.push_back(v);
    }
    return grid;
}

enum class TiePolicy { count_as_incorrect };

struct EvalConfig {
    std::size_t folds = 3;
    std::uint64_t seed = 42;
    std::vector<double> grid_ent = default_grid(0.0, 3.0, 0.25);    // 13 values
    std::vector<double> grid_con = default_grid(-3.0, 0.0, 0.25);   // 13 values
    std::vector<Method> methods{Method::min, Method::absmax, Method::clust};
    TiePolicy tie_policy = TiePolicy::count_as_incorrect;

    void validate() const {
        if (folds < 2) raise(errc::invalid_config, "folds must be >= 2");
        if (grid_ent.empty() || grid_con.empty())
            raise(errc::invalid_config, "weight grids must be nonempty");
        if (methods.empty()) raise(errc::invalid_config, "methods must be nonempty");
    }
};

using ScoreMap = std::unordered_map<std::string, double>;
using MatrixMap = std::unordered_map<std::string, NliMatrix>;

struct AccuracyResult {
    double accuracy = 0.0;
    std::size_t correct = 0;
    std::size_t ties = 0;
    std::size_t total = 0;
};

// Fraction of pairs where the real image scores strictly higher. An exact
// tie is never correct (conservative) and is tallied on the side.
inline AccuracyResult pairwise_accuracy(std::span<const PairRecord> pairs,
                                        const ScoreMap& scores) {
    AccuracyResult result;
    result.total = pairs.size();
    for (const auto& pair : pairs) {
        const auto real = scores.find(pair.real_image_id);
        if (real == scores.end())
            raise(errc::evaluation_input, "no score for image '" + pair.real_image_id + "'");
        const auto weird = scores.find(pair.weird_image_id);
        if (weird == scores.end())
            raise(errc::evaluation_input, "no score for image '" + pair.weird_image_id + "'");
        if (real->second > weird->second)
            ++result.correct;
        else if (real->second == weird->second)
            ++result.ties;
    }
    result.accuracy =
        pairs.empty() ? 0.0 : static_cast<double>(result.correct) / static_cast<double>(pairs.size());
    return result;
}

struct Fold {
    std::vector<PairRecord> train;
    std::vector<PairRecord> test;
};

// Seeded pair-level shuffle into near-equal contiguous test chunks. Pairs
// never straddle the train/test boundary, so no image of a test pair can
// leak into weight selection. The generator is mt19937_64 with an explicit
// bounded draw, making partitions identical across platforms.
inline std::vector<Fold> kfold_split(std::span<const PairRecord> pairs, std::size_t folds,
                                     std::uint64_t seed) {
    if (folds < 2) raise(errc::invalid_config, "folds must be >= 2");
    if (folds > pairs.size())
        raise(errc::invalid_config, "folds (" + std::to_string(folds) + ") exceed pair count (" +
                                        std::to_string(pairs.size()) + ")");
    std::vector<PairRecord> shuffled(pairs.begin(), pairs.end());
    std::mt19937_64 rng(seed);
    for (std::size_t i = shuffled.size() - 1; i > 0; --i)
        std::swap(shuffled[i], shuffled[rng() % (i + 1)]);

    const std::size_t base = shuffled.size() / folds;
    const std::size_t remainder = shuffled.size() % folds;
    std::vector<Fold> result(folds);
    std::size_t offset = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t size = base + (f < remainder ? 1 : 0);
        for (std::size_t i = 0; i < shuffled.size(); ++i) {
            auto& bucket =
                (i >= offset && i < offset + size) ? result[f].test : result[f].train;
            bucket.push_back(shuffled[i]);
        }
        offset += size;
    }
    return result;
}

// Scores every image referenced by `pairs` from its cached matrix. The exact
// reality_check path is used so evaluation numbers match pipeline numbers.
inline ScoreMap scores_from_matrices(std::span<const PairRecord> pairs, const MatrixMap& matrices,
                                     const ScoreWeights& weights, Method method) {
    ScoreMap scores;
    for (const auto& pair : pairs)
        for (const auto& id : {pair.real_image_id, pair.weird_image_id}) {
            if (scores.count(id) != 0) continue;
            const auto it = matrices.find(id);
            if (it == matrices.end())
                raise(errc::evaluation_input, "no cached matrix for image '" + id + "'");
            scores.emplace(id, reality_check(it->second, weights, method, id).value);
        }
    return scores;
}

// Exhaustive (w_ent, w_con) grid scan with w_neu fixed at 0. Accuracy ties
// break toward larger w_ent, then larger w_con, keeping reports reproducible.
inline ScoreWeights grid_search_weights(std::span<const PairRecord> train_pairs,
                                        const MatrixMap& matrices, Method method,
                                        std::span<const double> grid_ent,
                                        std::span<const double> grid_con) {
    if (grid_ent.empty() || grid_con.empty())
        raise(errc::invalid_config, "weight grids must be nonempty");
    bool have_best = false;
    double best_accuracy = -1.0;
    ScoreWeights best{0.0, 0.0, 0.0};
    for (const double w_ent : grid_ent)
        for (const double w_con : grid_con) {
            const ScoreWeights w{w_ent, w_con, 0.0};
            const double accuracy =
                pairwise_accuracy(train_pairs, scores_from_matrices(train_pairs, matrices, w, method))
                    .accuracy;
            const bool better =
                !have_best || accuracy > best_accuracy ||
                (accuracy == best_accuracy &&
                 (w_ent > best.w_ent || (w_ent == best.w_ent && w_con > best.w_con)));
            if (better) {
                have_best = true;
                best_accuracy = accuracy;
                best = w;
            }
        }
    return best;
}

struct FoldResult {
    std::size_t fold = 0;
    ScoreWeights best_weights;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    std::size_t test_ties = 0;
};

struct MethodReport {
    Method method = Method::clust;
    std::string nli_model_id;
    std::vector<FoldResult> folds;
    double mean_accuracy = 0.0;
    std::size_t total_ties = 0;
};

struct EvalReport {
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::vector<double> grid_ent;
    std::vector<double> grid_con;
    std::size_t pair_count = 0;
    std::vector<MethodReport> methods;
};

inline void to_json(json& j, const FoldResult& f) {
    j = json{{"fold", f.fold},
             {"best_weights", f.best_weights},
             {"train_accuracy", f.train_accuracy},
             {"test_accuracy", f.test_accuracy},
             {"test_ties", f.test_ties}};
}

inline void to_json(json& j, const MethodReport& m) {
    j = json{{"method", std::string(method_name(m.method))},
             {"nli_model_id", m.nli_model_id},
             {"folds", m.folds},
             {"mean_accuracy", m.mean_accuracy},
             {"total_ties", m.total_ties}};
}

inline void to_json(json& j, const EvalReport& r) {
    j = json{{"folds", r.folds},        {"seed", r.seed},
             {"grid_ent", r.grid_ent},  {"grid_con", r.grid_con},
             {"pair_count", r.pair_count}, {"methods", r.methods}};
}

inline std::string distinct_model_label(std::span<const PairRecord> pairs,
                                        const MatrixMap& matrices) {
    std::set<std::string> ids;
    for (const auto& pair : pairs)
        for (const auto& id : {pair.real_image_id, pair.weird_image_id}) {
            const auto it = matrices.find(id);
            if (it != matrices.end()) ids.insert(it->second.nli_model_id);
        }
    std::string label;
    for (const auto& id : ids) {
        if (!label.empty()) label += ",";
        label += id;
    }
    return label;
}

// Per fold: tune weights on the train split, evaluate on the held-out pairs.
// All folds reuse one seeded split so methods are compared on equal footing.
inline EvalReport cross_validate(std::span<const PairRecord> pairs, const EvalConfig& config,
                                 const MatrixMap& matrices) {
    config.validate();
    const auto folds = kfold_split(pairs, config.folds, config.seed);

    EvalReport report;
    report.folds = config.folds;
    report.seed = config.seed;
    report.grid_ent = config.grid_ent;
    report.grid_con = config.grid_con;
    report.pair_count = pairs.size();

    for (Method method : config.methods) {
        MethodReport mr;
        mr.method = method;
        mr.nli_model_id = distinct_model_label(pairs, matrices);
        double accuracy_sum = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            FoldResult fr;
            fr.fold = f;
            fr.best_weights = grid_search_weights(folds[f].train, matrices, method,
                                                  config.grid_ent, config.grid_con);
            fr.train_accuracy =
                pairwise_accuracy(folds[f].train, scores_from_matrices(folds[f].train, matrices,
                                                                       fr.best_weights, method))
                    .accuracy;
            const auto test = pairwise_accuracy(
                folds[f].test, scores_from_matrices(folds[f].test, matrices, fr.best_weights, method));
            fr.test_accuracy = test.accuracy;
            fr.test_ties = test.ties;
            accuracy_sum += fr.test_accuracy;
            mr.total_ties += fr.test_ties;
            mr.folds.push_back(std::move(fr));
        }
        mr.mean_accuracy = accuracy_sum / static_cast<double>(folds.size());
        report.methods.push_back(std::move(mr));
    }
    return report;
}

// Markdown table: one row per NLI model, one column per method, mean CV
// accuracy in percent.
inline std::string eval_report_markdown(const EvalReport& report) {
    std::ostringstream out;
    out << "| Model |";
    for (const auto& m : report.methods) out << " " << method_name(m.method) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < report.methods.size(); ++i) out << "---|";
    out << "\n";

    std::set<std::string> models;
    for (const auto& m : report.methods) models.insert(m.nli_model_id);
    for (const auto& model : models) {
        out << "| " << (model.empty() ? "(unknown)" : model) << " |";
        for (const auto& m : report.methods) {
            if (m.nli_model_id == model) {
                out << " " << std::fixed << std::setprecision(2) << m.mean_accuracy * 100.0 << " |";
            } else {
                out << " - |";
            }
        }
        out << "\n";
    }
    out << "\nPairs: " << report.pair_count << ", folds: " << report.folds
        << ", seed: " << report.seed << "\n";
    for (const auto& m : report.methods) {
        out << "\n### " << method_name(m.method) << "\n\n";
        out << "| Fold | w_ent | w_con | Train acc | Test acc | Ties |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto& f : m.folds) {
            out << "| " << f.fold << " | " << f.best_weights.w_ent << " | " << f.best_weights.w_con
                << " | " << std::fixed << std::setprecision(4) << f.train_accuracy << " | "
                << f.test_accuracy << " | " << f.test_ties << " |\n";
        }
    }
    return out.str();
}

}  // namespace rcheck
