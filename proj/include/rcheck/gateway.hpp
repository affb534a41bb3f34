// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcheck/backend.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/http_backend.hpp"
#include "rcheck/replay_backend.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

inline std::unique_ptr<FactBackend> make_fact_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
        case BackendKind::replay: return std::make_unique<ReplayFactBackend>(config.replay_path);
        case BackendKind::http_lvlm: return std::make_unique<HttpLvlmBackend>(config);
        case BackendKind::http_nli:
            raise(errc::invalid_config, "http_nli backend cannot generate facts");
    }
    raise(errc::invalid_config, "unknown backend kind");
}

inline std::unique_ptr<NliBackend> make_nli_backend(const BackendConfig& config) {
    config.validate();
    switch (config.kind) {
        case BackendKind::replay: return std::make_unique<ReplayNliBackend>(config.replay_path);
        case BackendKind::http_nli: return std::make_unique<HttpNliBackend>(config);
        case BackendKind::http_lvlm:
            raise(errc::invalid_config, "http_lvlm backend cannot score NLI pairs");
    }
    raise(errc::invalid_config, "unknown backend kind");
}

// Asks the backend for exactly params.num_facts atomic facts about the image.
// Surplus candidates are truncated; a short response is an error, never padded.
// image_id defaults to the image content digest when the caller has no name.
inline FactSet generate_facts(const std::vector<unsigned char>& image_bytes,
                              const std::string& media_type, const GenerationParams& params,
                              FactBackend& backend, std::string image_id = {}) {
    if (image_bytes.empty()) raise(errc::invalid_input, "image is empty");
    params.validate();

    FactGeneration gen = backend.generate(image_bytes, media_type, params);
    if (gen.facts.size() < params.num_facts)
        raise(errc::insufficient_facts,
              "backend returned " + std::to_string(gen.facts.size()) + " candidates, need " +
                  std::to_string(params.num_facts));
    gen.facts.resize(params.num_facts);
    for (const auto& fact : gen.facts)
        if (util::trim(fact).empty())
            raise(errc::malformed_response, "backend returned a blank fact");

    FactSet facts;
    facts.image_id = image_id.empty()
                         ? util::sha256_hex(image_bytes.data(), image_bytes.size())
                         : std::move(image_id);
    facts.facts = std::move(gen.facts);
    facts.gen_params = params;
    facts.model_id = gen.model_id;
    facts.generation_mode = gen.generation_mode;
    facts.validate();
    return facts;
}

inline FactSet generate_facts(const std::vector<unsigned char>& image_bytes,
                              const std::string& media_type, const GenerationParams& params,
                              const BackendConfig& config, std::string image_id = {}) {
    auto backend = make_fact_backend(config);
    return generate_facts(image_bytes, media_type, params, *backend, std::move(image_id));
}

// Directed premise -> hypothesis score, already normalized.
inline NliTriple score_pair(const std::string& premise, const std::string& hypothesis,
                            NliBackend& backend) {
    if (util::trim(premise).empty() || util::trim(hypothesis).empty())
        raise(errc::invalid_input, "premise and hypothesis must be nonempty");
    return backend.score(premise, hypothesis).triple;
}

inline NliTriple score_pair(const std::string& premise, const std::string& hypothesis,
                            const BackendConfig& config) {
    auto backend = make_nli_backend(config);
    return score_pair(premise, hypothesis, *backend);
}

// Scores every ordered fact pair (both directions, no diagonal): n(n-1)
// backend calls, optionally issued concurrently. The assembled matrix does
// not depend on completion order.
inline NliMatrix build_nli_matrix(const FactSet& facts, NliBackend& backend,
                                  std::size_t concurrency = 4) {
    facts.validate();
    const std::size_t n = facts.size();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(n * (n - 1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) pairs.emplace_back(i, j);

    std::vector<std::optional<NliResult>> results(pairs.size());
    util::parallel_for_indexed(pairs.size(), concurrency, [&](std::size_t k) {
        const auto [i, j] = pairs[k];
        try {
            results[k] = backend.score(facts.facts[i], facts.facts[j]);
        } catch (const error& e) {
            raise(errc::incomplete_matrix, "pair (" + std::to_string(i) + ", " +
                                               std::to_string(j) + ") failed: " + e.what());
        }
    });

    NliMatrix matrix;
    matrix.n = n;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        matrix.entries[pairs[k]] = results[k]->triple;
        if (matrix.nli_model_id.empty()) matrix.nli_model_id = results[k]->model_id;
    }
    matrix.validate();
    return matrix;
}

inline NliMatrix build_nli_matrix(const FactSet& facts, const BackendConfig& config,
                                  std::size_t concurrency = 4) {
    auto backend = make_nli_backend(config);
    return build_nli_matrix(facts, *backend, concurrency);
}

}  // namespace rcheck
