// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcheck/analysis.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/eval.hpp"
#include "rcheck/gateway.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/pipeline.hpp"

namespace rcheck::cli {

namespace fs = std::filesystem;

// Effective configuration after merging built-in defaults, the config file,
// and command-line flags (flags win).
struct AppConfig {
    std::string cache_dir = "cache";
    std::string run_dir = "runs";
    std::size_t concurrency = 4;
    bool fail_fast = false;
    GenerationParams gen_params;
    ScoreWeights weights{1.75, -2.0, 0.0};
    std::vector<Method> methods{Method::clust};
    EvalConfig eval;
    std::optional<BackendConfig> lvlm;
    std::optional<BackendConfig> nli;
    std::vector<std::string> markers = default_marker_words();
};

namespace detail {

inline BackendConfig parse_backend_json(const json& j, BackendKind http_kind,
                                        const std::string& default_token_env) {
    BackendConfig config;
    if (j.contains("kind"))
        config.kind = parse_backend_kind(j.at("kind").get<std::string>());
    else
        config.kind = j.contains("replay_path") ? BackendKind::replay : http_kind;
    config.endpoint_url = j.value("endpoint_url", std::string{});
    config.auth_token_env = j.value("auth_token_env", default_token_env);
    config.timeout_s = j.value("timeout_s", config.timeout_s);
    config.max_retries = j.value("max_retries", config.max_retries);
    config.replay_path = j.value("replay_path", std::string{});
    config.max_inflight = j.value("max_inflight", config.max_inflight);
    config.retry_backoff_ms = j.value("retry_backoff_ms", config.retry_backoff_ms);
    config.validate();
    return config;
}

inline std::vector<Method> parse_methods_csv(const std::string& csv) {
    std::vector<Method> methods;
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        const std::string name = util::trim(token);
        if (name.empty()) continue;
        methods.push_back(parse_method(name));
    }
    if (methods.empty()) raise(errc::invalid_config, "no method given");
    // canonical stable order, duplicates dropped
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    return methods;
}

inline ScoreWeights parse_weights_csv(const std::string& csv) {
    std::vector<double> values;
    std::stringstream stream(csv);
    std::string token;
    while (std::getline(stream, token, ',')) {
        try {
            std::size_t consumed = 0;
            const double v = std::stod(util::trim(token), &consumed);
            if (consumed != util::trim(token).size()) throw std::invalid_argument(token);
            values.push_back(v);
        } catch (const std::exception&) {
            raise(errc::invalid_config, "cannot parse weight '" + token + "'");
        }
    }
    if (values.size() != 3)
        raise(errc::invalid_config,
              "--weights expects ENT,CON,NEU (3 values), got " + std::to_string(values.size()));
    ScoreWeights weights{values[0], values[1], values[2]};
    weights.validate();
    return weights;
}

inline void apply_config_file(AppConfig& config, const fs::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::invalid_config, "config file not readable: " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded())
        raise(errc::invalid_config, "config file is not valid JSON: " + path.string());

    config.cache_dir = j.value("cache_dir", config.cache_dir);
    config.run_dir = j.value("run_dir", config.run_dir);
    config.concurrency = j.value("concurrency", config.concurrency);
    config.fail_fast = j.value("fail_fast", config.fail_fast);
    if (j.contains("generation")) {
        const auto& g = j.at("generation");
        config.gen_params.prompt = g.value("prompt", config.gen_params.prompt);
        config.gen_params.num_facts = g.value("num_facts", config.gen_params.num_facts);
        config.gen_params.num_beams = g.value("num_beams", config.gen_params.num_beams);
        config.gen_params.num_beam_groups =
            g.value("num_beam_groups", config.gen_params.num_beam_groups);
        config.gen_params.diversity_penalty =
            g.value("diversity_penalty", config.gen_params.diversity_penalty);
    }
    if (j.contains("weights")) config.weights = j.at("weights").get<ScoreWeights>();
    if (j.contains("methods")) {
        config.methods.clear();
        for (const auto& name : j.at("methods"))
            config.methods.push_back(parse_method(name.get<std::string>()));
    }
    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        config.eval.folds = e.value("folds", config.eval.folds);
        config.eval.seed = e.value("seed", config.eval.seed);
        if (e.contains("grid_ent")) config.eval.grid_ent = e.at("grid_ent").get<std::vector<double>>();
        if (e.contains("grid_con")) config.eval.grid_con = e.at("grid_con").get<std::vector<double>>();
        if (e.contains("methods")) {
            config.eval.methods.clear();
            for (const auto& name : e.at("methods"))
                config.eval.methods.push_back(parse_method(name.get<std::string>()));
        }
    }
    if (j.contains("markers"))
        config.markers = j.at("markers").get<std::vector<std::string>>();
    if (j.contains("backends")) {
        const auto& b = j.at("backends");
        if (b.contains("lvlm"))
            config.lvlm = parse_backend_json(b.at("lvlm"), BackendKind::http_lvlm,
                                             "REALITYCHECK_LVLM_TOKEN");
        if (b.contains("nli"))
            config.nli =
                parse_backend_json(b.at("nli"), BackendKind::http_nli, "REALITYCHECK_NLI_TOKEN");
    }
}

// Raw flag values; only values the user actually passed are applied.
struct Flags {
    std::optional<std::string> manifest, pairs, config, cache_dir, run_dir, annotations;
    std::optional<std::string> methods_csv, weights_csv;
    std::optional<std::string> lvlm_url, nli_url, replay_facts, replay_nli;
    std::optional<std::size_t> num_facts, folds, concurrency;
    std::optional<std::int64_t> seed;
    bool fail_fast = false;
    bool fail_fast_set = false;
};

inline void register_common_flags(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--manifest", flags.manifest, "JSON Lines manifest of images");
    cmd->add_option("--pairs", flags.pairs, "JSON Lines file of (real, weird) pairs");
    cmd->add_option("--config", flags.config, "JSON config file");
    cmd->add_option("--cache-dir", flags.cache_dir, "cache directory (facts.jsonl, nli.jsonl)");
    cmd->add_option("--run-dir", flags.run_dir, "output directory for records and reports");
    cmd->add_option("--method", flags.methods_csv,
                    "reduction method(s), comma separated: min|absmax|clust");
    cmd->add_option("--weights", flags.weights_csv, "score weights ENT,CON,NEU");
    cmd->add_option("--num-facts", flags.num_facts, "atomic facts per image");
    cmd->add_option("--folds", flags.folds, "cross-validation folds");
    cmd->add_option("--seed", flags.seed, "shuffle seed for fold assignment");
    cmd->add_option("--backend-lvlm-url", flags.lvlm_url, "HTTP LVLM endpoint URL");
    cmd->add_option("--backend-nli-url", flags.nli_url, "HTTP NLI endpoint URL");
    cmd->add_option("--replay-facts", flags.replay_facts, "replay file for fact generation");
    cmd->add_option("--replay-nli", flags.replay_nli, "replay file for NLI scoring");
    cmd->add_option("--annotations", flags.annotations,
                    "JSON Lines hallucination annotations (analyze)");
    cmd->add_option("--concurrency", flags.concurrency, "bounded worker count");
    cmd->add_flag_callback(
        "--fail-fast",
        [&flags] {
            flags.fail_fast = true;
            flags.fail_fast_set = true;
        },
        "abort the batch on the first failure");
}

inline AppConfig resolve_config(const Flags& flags) {
    AppConfig config;

    std::optional<std::string> config_path = flags.config;
    if (!config_path) {
        if (const char* env = std::getenv("REALITYCHECK_CONFIG"); env != nullptr && *env != '\0')
            config_path = env;
    }
    if (config_path) apply_config_file(config, *config_path);

    if (flags.cache_dir) config.cache_dir = *flags.cache_dir;
    if (flags.run_dir) config.run_dir = *flags.run_dir;
    if (flags.concurrency) config.concurrency = *flags.concurrency;
    if (flags.fail_fast_set) config.fail_fast = flags.fail_fast;
    if (flags.num_facts) {
        config.gen_params.num_facts = *flags.num_facts;
        // keep the paper's default coupling: one beam group per fact
        config.gen_params.num_beams = *flags.num_facts;
        config.gen_params.num_beam_groups = *flags.num_facts;
    }
    if (flags.weights_csv) config.weights = parse_weights_csv(*flags.weights_csv);
    if (flags.methods_csv) {
        config.methods = parse_methods_csv(*flags.methods_csv);
        config.eval.methods = config.methods;
    }
    if (flags.folds) config.eval.folds = *flags.folds;
    if (flags.seed) config.eval.seed = static_cast<std::uint64_t>(*flags.seed);

    if (flags.replay_facts && flags.lvlm_url)
        raise(errc::invalid_config, "choose one of --replay-facts and --backend-lvlm-url");
    if (flags.replay_facts) {
        BackendConfig b;
        b.kind = BackendKind::replay;
        b.replay_path = *flags.replay_facts;
        config.lvlm = b;
    } else if (flags.lvlm_url) {
        BackendConfig b;
        b.kind = BackendKind::http_lvlm;
        b.endpoint_url = *flags.lvlm_url;
        b.auth_token_env = "REALITYCHECK_LVLM_TOKEN";
        config.lvlm = b;
    }
    if (flags.replay_nli && flags.nli_url)
        raise(errc::invalid_config, "choose one of --replay-nli and --backend-nli-url");
    if (flags.replay_nli) {
        BackendConfig b;
        b.kind = BackendKind::replay;
        b.replay_path = *flags.replay_nli;
        config.nli = b;
    } else if (flags.nli_url) {
        BackendConfig b;
        b.kind = BackendKind::http_nli;
        b.endpoint_url = *flags.nli_url;
        b.auth_token_env = "REALITYCHECK_NLI_TOKEN";
        config.nli = b;
    }

    // stable column/report order regardless of how methods were spelled
    std::sort(config.methods.begin(), config.methods.end());
    config.methods.erase(std::unique(config.methods.begin(), config.methods.end()),
                         config.methods.end());
    std::sort(config.eval.methods.begin(), config.eval.methods.end());
    config.eval.methods.erase(
        std::unique(config.eval.methods.begin(), config.eval.methods.end()),
        config.eval.methods.end());

    if (config.lvlm) config.lvlm->validate();
    if (config.nli) config.nli->validate();
    return config;
}

inline std::string require_flag(const std::optional<std::string>& value, const char* name) {
    if (!value || value->empty())
        raise(errc::invalid_config, std::string("missing required option ") + name);
    return *value;
}

inline std::string config_digest(const AppConfig& config, const std::string& fact_identity,
                                 const std::string& nli_identity) {
    json methods = json::array();
    for (Method m : config.methods) methods.push_back(std::string(method_name(m)));
    return json_digest(json{{"gen", config.gen_params},
                            {"weights", config.weights},
                            {"methods", methods},
                            {"fact_backend", fact_identity},
                            {"nli_backend", nli_identity}})
        .substr(0, 12);
}

inline void report_cache_issues(const JsonlCache& cache, std::ostream& err) {
    for (const auto& issue : cache.issues())
        err << "warning: cache " << cache.path().string() << " line " << issue.line << ": "
            << issue.message << " (skipped)\n";
}

// Gathers run records written by previous score runs under run_dir.
inline std::vector<RunRecord> load_all_run_records(const fs::path& run_dir) {
    if (!fs::is_directory(run_dir))
        raise(errc::input,
              "run directory not found: " + run_dir.string() + "; run the score subcommand first");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.rfind("records-", 0) == 0 &&
            entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    if (files.empty())
        raise(errc::input,
              "no run records in " + run_dir.string() + "; run the score subcommand first");
    std::sort(files.begin(), files.end());
    std::vector<RunRecord> records;
    for (const auto& file : files) {
        auto batch = read_run_records(file);
        records.insert(records.end(), std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
    }
    return records;
}

inline MatrixMap matrices_from_records(const std::vector<RunRecord>& records) {
    MatrixMap matrices;
    for (const auto& r : records) matrices[r.image_id] = r.matrix;  // later runs win
    return matrices;
}

// Picks the per-image score for (method, weights); falls back to the only
// score recorded for the method when the weights digest does not match.
inline ScoreMap scores_from_records(const std::vector<RunRecord>& records, Method method,
                                    const ScoreWeights& weights) {
    const std::string wanted = score_key(method, weights);
    const std::string prefix = std::string(method_name(method)) + ":";
    ScoreMap scores;
    for (const auto& r : records) {
        const auto exact = r.scores.find(wanted);
        if (exact != r.scores.end()) {
            scores[r.image_id] = exact->second.value;
            continue;
        }
        const RealityScore* only = nullptr;
        for (const auto& [key, score] : r.scores)
            if (key.rfind(prefix, 0) == 0) {
                if (only != nullptr)
                    raise(errc::evaluation_input,
                          "image '" + r.image_id + "' has several '" + prefix.substr(0, prefix.size() - 1) +
                              "' scores under different weights; pass --weights to pick one");
                only = &score;
            }
        if (only == nullptr)
            raise(errc::evaluation_input, "image '" + r.image_id + "' has no '" +
                                              std::string(method_name(method)) +
                                              "' score in the run records");
        scores[r.image_id] = only->value;
    }
    return scores;
}

}  // namespace detail

// Configuration and input problems exit 1; runtime/backend failures that
// abort a run exit 2. Partial batch failures also exit 2 (handled by the
// subcommands).
inline int exit_code_for(const error& e) {
    switch (e.code()) {
        case errc::invalid_config:
        case errc::invalid_input:
        case errc::empty_input:
        case errc::input:
        case errc::evaluation_input:
        case errc::batch:
            return 1;
        default:
            return 2;
    }
}

// ---- subcommands ----------------------------------------------------------

inline int cmd_facts(const AppConfig& config, const detail::Flags& flags, std::ostream& out,
                     std::ostream& err) {
    const auto manifest = load_manifest(detail::require_flag(flags.manifest, "--manifest"));
    if (manifest.empty()) raise(errc::batch, "manifest is empty");
    if (!config.lvlm)
        raise(errc::invalid_config,
              "no LVLM backend configured: pass --replay-facts or --backend-lvlm-url, or set "
              "backends.lvlm in the config file");

    auto backend = make_fact_backend(*config.lvlm);
    JsonlCache facts_cache(fs::path(config.cache_dir) / "facts.jsonl");
    detail::report_cache_issues(facts_cache, err);
    FactStage stage(backend.get(), &facts_cache, config.gen_params);

    std::vector<std::optional<FactSet>> results(manifest.size());
    std::vector<std::optional<std::string>> failures(manifest.size());
    util::parallel_for_indexed(manifest.size(), config.concurrency, [&](std::size_t i) {
        try {
            results[i] = stage.fetch(manifest[i]);
        } catch (const std::exception& e) {
            if (config.fail_fast) throw;
            failures[i] = e.what();
        }
    });

    const fs::path export_path = fs::path(config.run_dir) / "facts.jsonl";
    fs::create_directories(config.run_dir);
    std::ofstream export_out(export_path, std::ios::trunc);
    if (!export_out) raise(errc::input, "cannot write " + export_path.string());
    std::size_t exported = 0;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        if (!results[i]) continue;
        export_out << json(*results[i]).dump() << "\n";
        ++exported;
    }
    export_out.close();

    std::size_t failed = 0;
    for (std::size_t i = 0; i < manifest.size(); ++i)
        if (failures[i]) {
            ++failed;
            err << "image " << manifest[i].image_id << " failed: " << *failures[i] << "\n";
        }
    err << "backend_requests facts=" << stage.backend_calls() << "\n";
    if (exported == 0)
        raise(errc::batch, "all " + std::to_string(manifest.size()) + " images failed");
    out << "facts: " << exported << " image(s) exported to " << export_path.string();
    if (failed > 0) out << ", " << failed << " failed";
    out << "\n";
    return failed == 0 ? 0 : 2;
}

inline int cmd_score(const AppConfig& config, const detail::Flags& flags, std::ostream& out,
                     std::ostream& err) {
    const auto manifest = load_manifest(detail::require_flag(flags.manifest, "--manifest"));

    std::unique_ptr<FactBackend> fact_backend;
    if (config.lvlm) fact_backend = make_fact_backend(*config.lvlm);
    std::unique_ptr<NliBackend> nli_backend;
    if (config.nli) nli_backend = make_nli_backend(*config.nli);

    JsonlCache facts_cache(fs::path(config.cache_dir) / "facts.jsonl");
    JsonlCache nli_cache(fs::path(config.cache_dir) / "nli.jsonl");
    detail::report_cache_issues(facts_cache, err);
    detail::report_cache_issues(nli_cache, err);

    PipelineOptions options{config.gen_params, config.weights, config.methods, config.concurrency,
                            config.fail_fast};
    Pipeline pipeline(fact_backend.get(), nli_backend.get(), &facts_cache, &nli_cache, options);
    const BatchResult result = pipeline.score_batch(manifest);

    const std::string digest = detail::config_digest(
        config, fact_backend ? fact_backend->cache_identity() : "cache-only",
        nli_backend ? nli_backend->cache_identity() : "cache-only");
    const fs::path run_dir(config.run_dir);
    write_run_records(run_dir / ("records-" + digest + ".jsonl"), result.records);

    json images = json::array();
    for (const auto& record : result.records) {
        json scores = json::object();
        for (Method method : config.methods)
            scores[std::string(method_name(method))] =
                record.scores.at(score_key(method, config.weights)).value;
        images.push_back(json{{"image_id", record.image_id}, {"scores", std::move(scores)}});
    }
    json method_names = json::array();
    for (Method method : config.methods) method_names.push_back(std::string(method_name(method)));
    const json scores_doc{
        {"methods", method_names}, {"weights", config.weights}, {"images", std::move(images)}};
    {
        std::ofstream scores_out(run_dir / "scores.json", std::ios::trunc);
        if (!scores_out) raise(errc::input, "cannot write " + (run_dir / "scores.json").string());
        scores_out << scores_doc.dump(2) << "\n";
    }

    std::size_t id_width = 8;
    for (const auto& record : result.records) id_width = std::max(id_width, record.image_id.size());
    out << std::left << std::setw(static_cast<int>(id_width) + 2) << "image_id";
    for (Method method : config.methods)
        out << std::right << std::setw(12) << method_name(method);
    out << "\n";
    for (const auto& record : result.records) {
        out << std::left << std::setw(static_cast<int>(id_width) + 2) << record.image_id;
        for (Method method : config.methods)
            out << std::right << std::setw(12) << std::fixed << std::setprecision(6)
                << record.scores.at(score_key(method, config.weights)).value;
        out << "\n";
    }

    for (const auto& failure : result.failures)
        err << "image " << failure.image_id << " failed: " << failure.message << "\n";
    err << "backend_requests facts=" << pipeline.fact_backend_calls()
        << " nli=" << pipeline.nli_backend_calls() << "\n";
    return result.failures.empty() ? 0 : 2;
}

inline int cmd_eval(const AppConfig& config, const detail::Flags& flags, std::ostream& out,
                    std::ostream& err) {
    const auto pairs = load_pairs(detail::require_flag(flags.pairs, "--pairs"));
    const auto records = detail::load_all_run_records(config.run_dir);
    const MatrixMap matrices = detail::matrices_from_records(records);

    const EvalReport report = cross_validate(pairs, config.eval, matrices);

    const fs::path run_dir(config.run_dir);
    {
        std::ofstream json_out(run_dir / "eval_report.json", std::ios::trunc);
        if (!json_out)
            raise(errc::input, "cannot write " + (run_dir / "eval_report.json").string());
        json_out << json(report).dump(2) << "\n";
    }
    const std::string markdown = eval_report_markdown(report);
    {
        std::ofstream md_out(run_dir / "eval_report.md", std::ios::trunc);
        md_out << markdown;
    }

    out << markdown << "\n";
    for (const auto& m : report.methods)
        out << method_name(m.method) << " mean_accuracy=" << std::fixed << std::setprecision(4)
            << m.mean_accuracy << "\n";
    (void)err;
    return 0;
}

inline int cmd_analyze(const AppConfig& config, const detail::Flags& flags, std::ostream& out,
                       std::ostream& err) {
    const auto pairs = load_pairs(detail::require_flag(flags.pairs, "--pairs"));
    const auto records = detail::load_all_run_records(config.run_dir);
    if (config.methods.size() != 1)
        raise(errc::invalid_config, "analyze uses exactly one method; pass a single --method");
    const Method method = config.methods.front();

    const ScoreMap scores = detail::scores_from_records(records, method, config.weights);
    std::unordered_map<std::string, const RunRecord*> by_id;
    for (const auto& record : records) by_id[record.image_id] = &record;

    std::unordered_map<std::string, bool> annotations;
    if (flags.annotations) annotations = load_annotations(*flags.annotations);

    std::vector<AnalysisRecord> analysis_records;
    for (const auto& pair : pairs) {
        const PairPrediction prediction = predict_weird_in_pair(pair, scores);
        const auto add = [&](const std::string& image_id, Prediction pred) {
            const auto it = by_id.find(image_id);
            if (it == by_id.end())
                raise(errc::evaluation_input,
                      "image '" + image_id + "' has no run record");
            AnalysisRecord record;
            record.image_id = image_id;
            record.flags.digital = detect_markers(it->second->fact_set, config.markers);
            if (const auto ann = annotations.find(image_id); ann != annotations.end())
                record.flags.hallucination = ann->second;
            record.prediction = pred;
            analysis_records.push_back(std::move(record));
        };
        add(pair.real_image_id, prediction.for_real_image);
        add(pair.weird_image_id, prediction.for_weird_image);
    }

    const ConditionalReport report = conditional_report(analysis_records);
    const fs::path run_dir(config.run_dir);
    {
        std::ofstream json_out(run_dir / "analysis_report.json", std::ios::trunc);
        if (!json_out)
            raise(errc::input, "cannot write " + (run_dir / "analysis_report.json").string());
        json_out << json(report).dump(2) << "\n";
    }
    const std::string markdown = conditional_report_markdown(report);
    {
        std::ofstream md_out(run_dir / "analysis_report.md", std::ios::trunc);
        md_out << markdown;
    }
    out << markdown;
    (void)err;
    return 0;
}

// ---- entry point ----------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"RealityCheck: image realism scoring via pairwise NLI over atomic facts",
                 "realitycheck"};
    app.require_subcommand(1);
    detail::Flags flags;
    auto* facts_cmd =
        app.add_subcommand("facts", "generate and cache atomic facts for a manifest");
    auto* score_cmd = app.add_subcommand("score", "score images end to end");
    auto* eval_cmd =
        app.add_subcommand("eval", "cross-validated paired accuracy with weight tuning");
    auto* analyze_cmd =
        app.add_subcommand("analyze", "marker and hallucination conditionals over run records");
    for (auto* cmd : {facts_cmd, score_cmd, eval_cmd, analyze_cmd})
        detail::register_common_flags(cmd, flags);

    try {
        std::reverse(args.begin(), args.end());  // CLI11 consumes args as a stack
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        const AppConfig config = detail::resolve_config(flags);
        if (facts_cmd->parsed()) return cmd_facts(config, flags, out, err);
        if (score_cmd->parsed()) return cmd_score(config, flags, out, err);
        if (eval_cmd->parsed()) return cmd_eval(config, flags, out, err);
        return cmd_analyze(config, flags, out, err);
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(std::move(args), out, err);
}

}  // namespace rcheck::cli
