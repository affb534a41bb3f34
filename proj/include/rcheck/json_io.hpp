// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rcheck/errors.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

using json = nlohmann::json;

inline void to_json(json& j, const NliTriple& t) {
    j = json{{"ent", t.ent}, {"con", t.con}, {"neu", t.neu}};
}

inline void from_json(const json& j, NliTriple& t) {
    j.at("ent").get_to(t.ent);
    j.at("con").get_to(t.con);
    j.at("neu").get_to(t.neu);
}

inline void to_json(json& j, const ScoreWeights& w) {
    j = json{{"w_ent", w.w_ent}, {"w_con", w.w_con}, {"w_neu", w.w_neu}};
}

inline void from_json(const json& j, ScoreWeights& w) {
    j.at("w_ent").get_to(w.w_ent);
    j.at("w_con").get_to(w.w_con);
    j.at("w_neu").get_to(w.w_neu);
}

inline void to_json(json& j, const GenerationParams& p) {
    j = json{{"prompt", p.prompt},
             {"num_facts", p.num_facts},
             {"num_beams", p.num_beams},
             {"num_beam_groups", p.num_beam_groups},
             {"diversity_penalty", p.diversity_penalty}};
}

inline void from_json(const json& j, GenerationParams& p) {
    j.at("prompt").get_to(p.prompt);
    j.at("num_facts").get_to(p.num_facts);
    j.at("num_beams").get_to(p.num_beams);
    j.at("num_beam_groups").get_to(p.num_beam_groups);
    j.at("diversity_penalty").get_to(p.diversity_penalty);
}

inline void to_json(json& j, const FactSet& f) {
    j = json{{"image_id", f.image_id},
             {"facts", f.facts},
             {"gen_params", f.gen_params},
             {"model_id", f.model_id},
             {"generation_mode", f.generation_mode}};
}

inline void from_json(const json& j, FactSet& f) {
    j.at("image_id").get_to(f.image_id);
    j.at("facts").get_to(f.facts);
    j.at("gen_params").get_to(f.gen_params);
    j.at("model_id").get_to(f.model_id);
    f.generation_mode = j.value("generation_mode", "diverse_beam_search");
}

inline void to_json(json& j, const NliMatrix& m) {
    json entries = json::array();
    for (const auto& [key, triple] : m.entries) {
        json e = triple;
        e["i"] = key.first;
        e["j"] = key.second;
        entries.push_back(std::move(e));
    }
    j = json{{"n", m.n}, {"nli_model_id", m.nli_model_id}, {"entries", std::move(entries)}};
}

inline void from_json(const json& j, NliMatrix& m) {
    j.at("n").get_to(m.n);
    j.at("nli_model_id").get_to(m.nli_model_id);
    m.entries.clear();
    for (const auto& e : j.at("entries")) {
        const auto i = e.at("i").get<std::size_t>();
        const auto k = e.at("j").get<std::size_t>();
        m.entries.emplace(std::make_pair(i, k), e.get<NliTriple>());
    }
}

inline void to_json(json& j, const RealityScore& s) {
    j = json{{"image_id", s.image_id},
             {"value", s.value},
             {"method", std::string(method_name(s.method))},
             {"weights", s.weights},
             {"s_nli_values", s.s_nli_values}};
}

inline void from_json(const json& j, RealityScore& s) {
    j.at("image_id").get_to(s.image_id);
    j.at("value").get_to(s.value);
    s.method = parse_method(j.at("method").get<std::string>());
    j.at("weights").get_to(s.weights);
    j.at("s_nli_values").get_to(s.s_nli_values);
}

// Stable hex digest of a JSON document; object keys are already sorted by the
// json object representation, so semantically equal documents hash equally.
inline std::string json_digest(const json& j) { return util::sha256_hex(j.dump()); }

inline std::string weights_digest(const ScoreWeights& w) {
    return json_digest(json(w)).substr(0, 12);
}

}  // namespace rcheck
