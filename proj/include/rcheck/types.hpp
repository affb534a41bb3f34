// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rcheck/errors.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

// Entailment / contradiction / neutrality scores for one ordered fact pair.
// Components live in [0, 1] and sum to 1 within 1e-3; normalization happens
// upstream at the backend adapter.
struct NliTriple {
    double ent = 0.0;
    double con = 0.0;
    double neu = 0.0;

    bool operator==(const NliTriple&) const = default;

    void validate() const {
        constexpr double bound_slack = 1e-9;
        constexpr double sum_tol = 1e-3;
        for (double v : {ent, con, neu}) {
            if (!std::isfinite(v)) raise(errc::invalid_input, "NliTriple component is not finite");
            if (v < -bound_slack || v > 1.0 + bound_slack)
                raise(errc::invalid_input, "NliTriple component outside [0, 1]");
        }
        if (std::abs(ent + con + neu - 1.0) > sum_tol)
            raise(errc::invalid_input, "NliTriple components do not sum to 1 within 1e-3");
    }
};

// Weights of the linear combination over an NliTriple. No sign constraint:
// the useful optimum has a negative contradiction weight.
struct ScoreWeights {
    double w_ent = 1.75;
    double w_con = -2.0;
    double w_neu = 0.0;

    void validate() const {
        if (!std::isfinite(w_ent) || !std::isfinite(w_con) || !std::isfinite(w_neu))
            raise(errc::invalid_input, "ScoreWeights must be finite");
    }
};

struct GenerationParams {
    std::string prompt = "Provide a short, one-sentence descriptive fact about this image.";
    std::size_t num_facts = 5;
    std::size_t num_beams = 5;
    std::size_t num_beam_groups = 5;
    double diversity_penalty = 1.0;

    void validate() const {
        if (prompt.empty()) raise(errc::invalid_config, "generation prompt must be nonempty");
        if (num_facts == 0) raise(errc::invalid_config, "num_facts must be positive");
        if (num_beams == 0 || num_beam_groups == 0)
            raise(errc::invalid_config, "num_beams and num_beam_groups must be positive");
        if (!(diversity_penalty > 0.0))
            raise(errc::invalid_config, "diversity_penalty must be > 0");
    }
};

// Atomic facts generated for one image, with provenance.
struct FactSet {
    std::string image_id;
    std::vector<std::string> facts;
    GenerationParams gen_params;
    std::string model_id;
    std::string generation_mode = "diverse_beam_search";

    std::size_t size() const { return facts.size(); }

    void validate() const {
        if (facts.size() < 2)
            raise(errc::invalid_input, "FactSet needs at least 2 facts, got " +
                                           std::to_string(facts.size()));
        for (const auto& f : facts)
            if (util::trim(f).empty())
                raise(errc::invalid_input, "FactSet contains a blank fact");
    }
};

// Ordered-pair NLI scores over a fact set: entries for every (i, j), i != j.
struct NliMatrix {
    std::size_t n = 0;
    std::map<std::pair<std::size_t, std::size_t>, NliTriple> entries;
    std::string nli_model_id;

    const NliTriple& at(std::size_t i, std::size_t j) const {
        auto it = entries.find({i, j});
        if (it == entries.end())
            raise(errc::incomplete_matrix, "missing entry for ordered pair (" +
                                               std::to_string(i) + ", " + std::to_string(j) + ")");
        return it->second;
    }

    void validate() const {
        const std::size_t expected = n == 0 ? 0 : n * (n - 1);
        if (entries.size() != expected)
            raise(errc::incomplete_matrix,
                  "expected " + std::to_string(expected) + " entries, found " +
                      std::to_string(entries.size()));
        for (const auto& [key, triple] : entries) {
            if (key.first == key.second)
                raise(errc::invalid_input, "diagonal entry (" + std::to_string(key.first) +
                                               ", " + std::to_string(key.second) + ") not allowed");
            if (key.first >= n || key.second >= n)
                raise(errc::invalid_input, "entry index out of range");
            triple.validate();
        }
    }
};

enum class Method { min, absmax, clust };

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::min: return "min";
        case Method::absmax: return "absmax";
        case Method::clust: return "clust";
    }
    return "?";
}

inline Method parse_method(std::string_view name) {
    if (name == "min") return Method::min;
    if (name == "absmax") return Method::absmax;
    if (name == "clust") return Method::clust;
    raise(errc::invalid_config,
          "unknown method '" + std::string(name) + "' (valid: min, absmax, clust)");
}

// Final per-image score with the trace of symmetric pair sums it was reduced from.
struct RealityScore {
    std::string image_id;
    double value = 0.0;
    Method method = Method::clust;
    ScoreWeights weights;
    std::vector<double> s_nli_values;  // one sum per unordered pair, (i < j) order
};

}  // namespace rcheck
