// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcheck/backend.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/json_io.hpp"

namespace rcheck {

// Append-only JSON Lines store with an in-memory last-write-wins index.
// Line format: {"key": <hex digest>, "value": <record>}. Unparseable lines
// are skipped and reported via issues(); everything else keeps being served.
class JsonlCache {
public:
    struct Issue {
        std::size_t line = 0;
        std::string message;
    };

    explicit JsonlCache(std::filesystem::path path) : path_(std::move(path)) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        std::ifstream in(path_);
        if (!in) return;  // cold cache
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("key") ||
                !j.at("key").is_string() || !j.contains("value")) {
                issues_.push_back({line_no, "unparseable cache line"});
                continue;
            }
            index_[j.at("key").get<std::string>()] = j.at("value");
        }
    }

    std::optional<json> get(const std::string& key) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = index_.find(key);
        if (it == index_.end()) {
            ++misses_;
            return std::nullopt;
        }
        ++hits_;
        return it->second;
    }

    void put(const std::string& key, json value) {
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(path_, std::ios::app);
        if (!out) raise(errc::input, "cache file not writable: " + path_.string());
        out << json{{"key", key}, {"value", value}}.dump() << "\n";
        out.flush();
        if (!out) raise(errc::input, "cache append failed: " + path_.string());
        index_[key] = std::move(value);
    }

    const std::vector<Issue>& issues() const { return issues_; }
    std::size_t size() const {
        std::lock_guard<std::mutex> lock(mu_);
        return index_.size();
    }

    // Key-sorted copy of the live index; the deterministic order matters to
    // cache-only readers that scan values.
    std::vector<std::pair<std::string, json>> snapshot() const {
        std::lock_guard<std::mutex> lock(mu_);
        std::vector<std::pair<std::string, json>> out(index_.begin(), index_.end());
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }
    std::uint64_t hits() const { return hits_.load(); }
    std::uint64_t misses() const { return misses_.load(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, json> index_;
    std::vector<Issue> issues_;
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> misses_{0};
};

inline std::string fact_cache_key(const std::string& image_sha256, const GenerationParams& params,
                                  const std::string& backend_identity) {
    return json_digest(json{{"image_sha256", image_sha256},
                            {"prompt", params.prompt},
                            {"params", params},
                            {"backend", backend_identity}});
}

inline std::string nli_cache_key(const std::string& premise, const std::string& hypothesis,
                                 const std::string& backend_identity) {
    return json_digest(
        json{{"premise", premise}, {"hypothesis", hypothesis}, {"backend", backend_identity}});
}

// NliBackend decorator that consults a JsonlCache before delegating. Cache
// hits do not touch the inner backend, so its call counter directly measures
// real requests. Cached values carry their own key fields so cache-only
// readers can serve them without knowing the backend identity.
class CachedNliBackend final : public NliBackend {
public:
    CachedNliBackend(NliBackend& inner, JsonlCache* cache) : inner_(inner), cache_(cache) {}

    NliResult score(const std::string& premise, const std::string& hypothesis) override {
        if (cache_ == nullptr) return inner_.score(premise, hypothesis);
        const std::string key = nli_cache_key(premise, hypothesis, inner_.cache_identity());
        if (auto hit = cache_->get(key)) {
            try {
                return {hit->at("triple").get<NliTriple>(),
                        hit->at("model_id").get<std::string>()};
            } catch (const json::exception&) {
                raise(errc::cache_integrity, "undecodable NLI cache record for key " + key);
            }
        }
        NliResult result = inner_.score(premise, hypothesis);
        cache_->put(key, json{{"premise", premise},
                              {"hypothesis", hypothesis},
                              {"backend", inner_.cache_identity()},
                              {"triple", result.triple},
                              {"model_id", result.model_id}});
        return result;
    }

    std::string cache_identity() const override { return inner_.cache_identity(); }

private:
    NliBackend& inner_;
    JsonlCache* cache_;
};

// Serves NLI triples purely from previously cached records, looked up by
// (premise, hypothesis) content. Used when no backend is configured. Records
// from different backends that disagree are rejected rather than silently
// picked between.
class CacheOnlyNliBackend final : public NliBackend {
public:
    explicit CacheOnlyNliBackend(const JsonlCache& cache) {
        for (const auto& [key, value] : cache.snapshot()) {
            if (!value.is_object() || !value.contains("premise") ||
                !value.contains("hypothesis") || !value.contains("triple"))
                continue;
            try {
                Entry entry{value.at("triple").get<NliTriple>(),
                            value.value("model_id", std::string{}),
                            value.value("backend", std::string{})};
                index_[value.at("premise").get<std::string>() + '\x1f' +
                       value.at("hypothesis").get<std::string>()]
                    .push_back(std::move(entry));
            } catch (const json::exception&) {
                // not an NLI record; other record shapes may share the file
            }
        }
    }

    NliResult score(const std::string& premise, const std::string& hypothesis) override {
        calls_.fetch_add(1);
        const auto it = index_.find(premise + '\x1f' + hypothesis);
        if (it == index_.end())
            raise(errc::transport, "NLI pair not cached (premise '" + premise +
                                       "'); run the score pipeline with a backend first");
        const Entry& first = it->second.front();
        for (const Entry& e : it->second)
            if (!(e.triple == first.triple) || e.model_id != first.model_id)
                raise(errc::invalid_config,
                      "ambiguous cache: conflicting NLI records (backends '" + first.backend +
                          "' vs '" + e.backend + "'); configure a backend explicitly");
        return {first.triple, first.model_id};
    }

    std::string cache_identity() const override { return "cache-only"; }

private:
    struct Entry {
        NliTriple triple;
        std::string model_id;
        std::string backend;
    };
    std::unordered_map<std::string, std::vector<Entry>> index_;
};

// Fact-set counterpart of CacheOnlyNliBackend: serves recorded fact sets by
// (image digest, prompt, generation params).
class CacheOnlyFactBackend final : public FactBackend {
public:
    explicit CacheOnlyFactBackend(const JsonlCache& cache) {
        for (const auto& [key, value] : cache.snapshot()) {
            if (!value.is_object() || !value.contains("image_sha256") ||
                !value.contains("fact_set"))
                continue;
            try {
                Entry entry{value.at("fact_set").get<FactSet>(),
                            value.value("backend", std::string{})};
                index_[value.at("image_sha256").get<std::string>() + '\x1f' +
                       lookup_suffix(entry.fact_set.gen_params)]
                    .push_back(std::move(entry));
            } catch (const json::exception&) {
                // skip foreign record shapes
            }
        }
    }

    FactGeneration generate(const std::vector<unsigned char>& image_bytes,
                            const std::string& /*media_type*/,
                            const GenerationParams& params) override {
        calls_.fetch_add(1);
        const std::string sha = util::sha256_hex(image_bytes.data(), image_bytes.size());
        const auto it = index_.find(sha + '\x1f' + lookup_suffix(params));
        if (it == index_.end())
            raise(errc::transport, "image facts not cached (sha256=" + sha +
                                       "); run the facts subcommand first");
        const Entry& first = it->second.front();
        for (const Entry& e : it->second)
            if (e.fact_set.facts != first.fact_set.facts)
                raise(errc::invalid_config,
                      "ambiguous cache: conflicting fact records (backends '" + first.backend +
                          "' vs '" + e.backend + "'); configure a backend explicitly");
        return {first.fact_set.facts, first.fact_set.model_id, first.fact_set.generation_mode};
    }

    std::string cache_identity() const override { return "cache-only"; }

private:
    static std::string lookup_suffix(const GenerationParams& p) {
        return p.prompt + '\x1f' +
               json{{"num_facts", p.num_facts},
                    {"num_beams", p.num_beams},
                    {"num_beam_groups", p.num_beam_groups},
                    {"diversity_penalty", p.diversity_penalty}}
                   .dump();
    }

    struct Entry {
        FactSet fact_set;
        std::string backend;
    };
    std::unordered_map<std::string, std::vector<Entry>> index_;
};

}  // namespace rcheck
