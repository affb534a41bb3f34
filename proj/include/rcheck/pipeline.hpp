// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcheck/backend.hpp"
#include "rcheck/cache.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/gateway.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/scoring.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

struct ImageRecord {
    std::string image_id;
    std::string path;
    std::string sha256;  // filled when the file is read; verified if preset
    std::optional<std::string> label;  // "real" | "weird"
    std::optional<std::string> pair_id;
};

inline void to_json(json& j, const ImageRecord& r) {
    j = json{{"image_id", r.image_id},
             {"path", r.path},
             {"label", r.label ? json(*r.label) : json(nullptr)},
             {"pair_id", r.pair_id ? json(*r.pair_id) : json(nullptr)}};
}

inline void from_json(const json& j, ImageRecord& r) {
    j.at("image_id").get_to(r.image_id);
    j.at("path").get_to(r.path);
    r.label.reset();
    if (j.contains("label") && !j.at("label").is_null()) {
        const auto label = j.at("label").get<std::string>();
        if (label != "real" && label != "weird")
            raise(errc::input, "image label must be 'real' or 'weird', got '" + label + "'");
        r.label = label;
    }
    r.pair_id.reset();
    if (j.contains("pair_id") && !j.at("pair_id").is_null())
        r.pair_id = j.at("pair_id").get<std::string>();
}

inline std::vector<ImageRecord> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::input, "manifest not readable: " + path.string());
    std::vector<ImageRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(errc::input,
                  "manifest " + path.string() + ": unparseable line " + std::to_string(line_no));
        records.push_back(j.get<ImageRecord>());
    }
    return records;
}

struct RunTimestamps {
    std::int64_t started_unix_ms = 0;
    std::int64_t finished_unix_ms = 0;
};

inline void to_json(json& j, const RunTimestamps& t) {
    j = json{{"started_unix_ms", t.started_unix_ms}, {"finished_unix_ms", t.finished_unix_ms}};
}

inline void from_json(const json& j, RunTimestamps& t) {
    j.at("started_unix_ms").get_to(t.started_unix_ms);
    j.at("finished_unix_ms").get_to(t.finished_unix_ms);
}

// Everything the pipeline produced for one image. Scores are keyed by
// "<method>:<weights digest>" so one record can hold several weightings
// computed from the same cached matrix.
struct RunRecord {
    std::string image_id;
    FactSet fact_set;
    NliMatrix matrix;
    std::map<std::string, RealityScore> scores;
    RunTimestamps timestamps;
    std::map<std::string, std::string> backend_model_ids;
};

inline std::string score_key(Method method, const ScoreWeights& weights) {
    return std::string(method_name(method)) + ":" + weights_digest(weights);
}

inline void to_json(json& j, const RunRecord& r) {
    j = json{{"image_id", r.image_id},
             {"fact_set", r.fact_set},
             {"matrix", r.matrix},
             {"scores", r.scores},
             {"timestamps", r.timestamps},
             {"backend_model_ids", r.backend_model_ids}};
}

inline void from_json(const json& j, RunRecord& r) {
    j.at("image_id").get_to(r.image_id);
    j.at("fact_set").get_to(r.fact_set);
    j.at("matrix").get_to(r.matrix);
    j.at("scores").get_to(r.scores);
    j.at("timestamps").get_to(r.timestamps);
    j.at("backend_model_ids").get_to(r.backend_model_ids);
}

// Spot check: the stored trace and value must be recomputable from the
// stored matrix and weights.
inline bool run_record_consistent(const RunRecord& record) {
    for (const auto& [key, score] : record.scores) {
        const auto recomputed =
            reality_check(record.matrix, score.weights, score.method, score.image_id);
        if (recomputed.s_nli_values != score.s_nli_values) return false;
        if (recomputed.value != score.value) return false;
    }
    return true;
}

struct BatchFailure {
    std::string image_id;
    std::string message;
};

struct BatchResult {
    std::vector<RunRecord> records;  // manifest order, failed images omitted
    std::vector<BatchFailure> failures;
};

struct PipelineOptions {
    GenerationParams gen_params;
    ScoreWeights weights;
    std::vector<Method> methods{Method::clust};
    std::size_t concurrency = 4;
    bool fail_fast = false;
};

// Fact acquisition with caching in front of the backend. A null backend
// means cache-only: fact sets are served by image content from previously
// cached records and nothing is fetched or written back.
class FactStage {
public:
    FactStage(FactBackend* backend, JsonlCache* cache, GenerationParams params)
        : backend_(backend), cache_(cache), params_(std::move(params)) {
        params_.validate();
        if (backend_ == nullptr && cache_ == nullptr)
            raise(errc::invalid_config, "no fact source: configure a backend or a cache");
        if (backend_ == nullptr) cache_only_.emplace(*cache_);
    }

    // Reads the image, verifies a preset digest, and resolves the fact set
    // through cache and backend.
    FactSet fetch(const ImageRecord& image) const {
        const auto bytes = util::read_file_bytes(image.path);
        const std::string sha = util::sha256_hex(bytes.data(), bytes.size());
        if (!image.sha256.empty() && image.sha256 != sha)
            raise(errc::input, "sha256 mismatch for " + image.path + ": manifest says " +
                                   image.sha256 + ", file is " + sha);
        return fetch_from(bytes, util::media_type_for(image.path), image.image_id, sha);
    }

    FactSet fetch_from(const std::vector<unsigned char>& bytes, const std::string& media_type,
                       const std::string& image_id, const std::string& sha) const {
        if (backend_ == nullptr)  // cache-only: no key derivation, no write-back
            return generate_facts(bytes, media_type, params_, *cache_only_, image_id);
        if (cache_ == nullptr) return generate_facts(bytes, media_type, params_, *backend_, image_id);
        const std::string key = fact_cache_key(sha, params_, backend_->cache_identity());
        if (auto hit = cache_->get(key)) {
            try {
                auto facts = hit->at("fact_set").get<FactSet>();
                facts.image_id = image_id;  // same content may be known under another id
                facts.validate();
                return facts;
            } catch (const json::exception&) {
                raise(errc::cache_integrity, "undecodable fact cache record for key " + key);
            }
        }
        FactSet facts = generate_facts(bytes, media_type, params_, *backend_, image_id);
        cache_->put(key, json{{"image_sha256", sha},
                              {"backend", backend_->cache_identity()},
                              {"fact_set", facts}});
        return facts;
    }

    std::uint64_t backend_calls() const { return backend_ != nullptr ? backend_->calls() : 0; }

private:
    FactBackend* backend_;
    JsonlCache* cache_;
    GenerationParams params_;
    mutable std::optional<CacheOnlyFactBackend> cache_only_;
};

// facts -> pairwise NLI -> reduction, with content-addressed caching in
// front of both backends. A null backend puts that stage into cache-only
// mode: records are served by content from the corresponding cache and
// nothing is ever fetched or written back.
class Pipeline {
public:
    Pipeline(FactBackend* fact_backend, NliBackend* nli_backend, JsonlCache* facts_cache,
             JsonlCache* nli_cache, PipelineOptions options)
        : nli_backend_(nli_backend),
          options_(std::move(options)),
          fact_stage_(fact_backend, facts_cache, options_.gen_params) {
        options_.weights.validate();
        if (options_.methods.empty())
            raise(errc::invalid_config, "at least one reduction method is required");
        if (nli_backend_ == nullptr && nli_cache == nullptr)
            raise(errc::invalid_config, "no NLI source: configure a backend or a cache");
        if (nli_backend_ != nullptr) {
            cached_nli_.emplace(*nli_backend_, nli_cache);
            active_nli_ = &*cached_nli_;
        } else {
            cache_only_nli_.emplace(*nli_cache);
            active_nli_ = &*cache_only_nli_;
        }
    }

    RunRecord score_image(const ImageRecord& image) const {
        RunRecord record;
        record.timestamps.started_unix_ms = now_ms();
        record.image_id = image.image_id;

        record.fact_set = fact_stage_.fetch(image);
        record.matrix = build_nli_matrix(record.fact_set, *active_nli_, options_.concurrency);

        for (Method method : options_.methods) {
            auto score = reality_check(record.matrix, options_.weights, method, image.image_id);
            record.scores.emplace(score_key(method, options_.weights), std::move(score));
        }

        record.backend_model_ids["lvlm"] = record.fact_set.model_id;
        record.backend_model_ids["nli"] = record.matrix.nli_model_id;
        record.timestamps.finished_unix_ms = now_ms();
        return record;
    }

    // Bounded image-level parallelism; result order follows the manifest.
    // Failures are collected unless fail_fast is set, in which case the first
    // error aborts the batch and is rethrown.
    BatchResult score_batch(std::span<const ImageRecord> manifest) const {
        if (manifest.empty()) raise(errc::batch, "manifest is empty");
        std::vector<std::optional<RunRecord>> slots(manifest.size());
        std::vector<std::optional<BatchFailure>> failures(manifest.size());

        if (options_.fail_fast) {
            util::parallel_for_indexed(manifest.size(), options_.concurrency,
                                       [&](std::size_t i) { slots[i] = score_image(manifest[i]); });
        } else {
            util::parallel_for_indexed(manifest.size(), options_.concurrency, [&](std::size_t i) {
                try {
                    slots[i] = score_image(manifest[i]);
                } catch (const std::exception& e) {
                    failures[i] = BatchFailure{manifest[i].image_id, e.what()};
                }
            });
        }

        BatchResult result;
        for (std::size_t i = 0; i < manifest.size(); ++i) {
            if (slots[i])
                result.records.push_back(std::move(*slots[i]));
            else if (failures[i])
                result.failures.push_back(std::move(*failures[i]));
        }
        if (result.records.empty())
            raise(errc::batch, "all " + std::to_string(manifest.size()) + " images failed; first: " +
                                   (result.failures.empty() ? "unknown" : result.failures[0].message));
        return result;
    }

    // Real backend requests only; cache-only lookups count as zero.
    std::uint64_t fact_backend_calls() const { return fact_stage_.backend_calls(); }
    std::uint64_t nli_backend_calls() const {
        return nli_backend_ != nullptr ? nli_backend_->calls() : 0;
    }

private:
    static std::int64_t now_ms() {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::system_clock::now().time_since_epoch())
            .count();
    }

    NliBackend* nli_backend_;
    PipelineOptions options_;
    FactStage fact_stage_;
    mutable std::optional<CachedNliBackend> cached_nli_;
    mutable std::optional<CacheOnlyNliBackend> cache_only_nli_;
    NliBackend* active_nli_ = nullptr;
};

inline void write_run_records(const std::filesystem::path& file,
                              std::span<const RunRecord> records) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::trunc);
    if (!out) raise(errc::input, "run record file not writable: " + file.string());
    for (const auto& r : records) out << json(r).dump() << "\n";
}

inline std::vector<RunRecord> read_run_records(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) raise(errc::input, "run record file not readable: " + file.string());
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(errc::input,
                  "run records " + file.string() + ": unparseable line " + std::to_string(line_no));
        records.push_back(j.get<RunRecord>());
    }
    return records;
}

}  // namespace rcheck
