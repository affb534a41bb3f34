// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rcheck/backend.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

// Deterministic stand-ins for live inference services: they serve responses
// previously recorded to JSON Lines files. Two runs over the same replay
// files are byte-identical.

namespace rcheck {

namespace detail {

inline std::string gen_params_key(const GenerationParams& p) {
    return json{{"num_facts", p.num_facts},
                {"num_beams", p.num_beams},
                {"num_beam_groups", p.num_beam_groups},
                {"diversity_penalty", p.diversity_penalty}}
        .dump();
}

inline std::vector<json> read_jsonl_strict(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::input, "replay file not readable: " + path.string());
    std::vector<json> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(errc::input,
                  "replay file " + path.string() + ": unparseable line " + std::to_string(line_no));
        records.push_back(std::move(j));
    }
    return records;
}

inline std::string replay_identity(const std::set<std::string>& model_ids,
                                   const std::filesystem::path& path) {
    if (model_ids.size() == 1) return "replay:" + *model_ids.begin();
    return "replay:" + path.filename().string();
}

}  // namespace detail

class ReplayFactBackend final : public FactBackend {
public:
    explicit ReplayFactBackend(std::filesystem::path path) : path_(std::move(path)) {
        std::set<std::string> model_ids;
        for (const auto& j : detail::read_jsonl_strict(path_)) {
            Record rec;
            rec.facts = j.at("facts").get<std::vector<std::string>>();
            rec.model_id = j.at("model_id").get<std::string>();
            rec.generation_mode = j.value("generation_mode", "diverse_beam_search");
            GenerationParams p;
            const auto& jp = j.at("params");
            jp.at("num_facts").get_to(p.num_facts);
            jp.at("num_beams").get_to(p.num_beams);
            jp.at("num_beam_groups").get_to(p.num_beam_groups);
            jp.at("diversity_penalty").get_to(p.diversity_penalty);
            const std::string key = j.at("image_sha256").get<std::string>() + '\x1f' +
                                    j.at("prompt").get<std::string>() + '\x1f' +
                                    detail::gen_params_key(p);
            records_[key] = std::move(rec);  // last record wins
            model_ids.insert(records_[key].model_id);
        }
        identity_ = detail::replay_identity(model_ids, path_);
    }

    FactGeneration generate(const std::vector<unsigned char>& image_bytes,
                            const std::string& /*media_type*/,
                            const GenerationParams& params) override {
        calls_.fetch_add(1);
        const std::string sha = util::sha256_hex(image_bytes.data(), image_bytes.size());
        const std::string key = sha + '\x1f' + params.prompt + '\x1f' + detail::gen_params_key(params);
        auto it = records_.find(key);
        if (it == records_.end())
            raise(errc::transport,
                  "no replay fact record for image sha256=" + sha + " in " + path_.string());
        return {it->second.facts, it->second.model_id, it->second.generation_mode};
    }

    std::string cache_identity() const override { return identity_; }

private:
    struct Record {
        std::vector<std::string> facts;
        std::string model_id;
        std::string generation_mode;
    };
    std::filesystem::path path_;
    std::unordered_map<std::string, Record> records_;
    std::string identity_;
};

class ReplayNliBackend final : public NliBackend {
public:
    explicit ReplayNliBackend(std::filesystem::path path) : path_(std::move(path)) {
        std::set<std::string> model_ids;
        for (const auto& j : detail::read_jsonl_strict(path_)) {
            Record rec;
            rec.raw.labels = j.at("labels").get<std::vector<std::string>>();
            rec.raw.values = j.at("scores").get<std::vector<double>>();
            rec.raw.normalized = j.value("normalized", false);
            rec.model_id = j.at("model_id").get<std::string>();
            const std::string key =
                j.at("premise").get<std::string>() + '\x1f' + j.at("hypothesis").get<std::string>();
            records_[key] = std::move(rec);  // last record wins
            model_ids.insert(records_[key].model_id);
        }
        identity_ = detail::replay_identity(model_ids, path_);
    }

    NliResult score(const std::string& premise, const std::string& hypothesis) override {
        calls_.fetch_add(1);
        auto it = records_.find(premise + '\x1f' + hypothesis);
        if (it == records_.end())
            raise(errc::transport, "no replay NLI record for premise '" + premise +
                                       "' / hypothesis '" + hypothesis + "' in " + path_.string());
        return {normalize_raw(it->second.raw), it->second.model_id};
    }

    std::string cache_identity() const override { return identity_; }

private:
    struct Record {
        RawNliOutput raw;
        std::string model_id;
    };
    std::filesystem::path path_;
    std::unordered_map<std::string, Record> records_;
    std::string identity_;
};

}  // namespace rcheck
