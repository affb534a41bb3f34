// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcheck/errors.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

enum class BackendKind { http_lvlm, http_nli, replay };

inline std::string_view backend_kind_name(BackendKind k) {
    switch (k) {
        case BackendKind::http_lvlm: return "http_lvlm";
        case BackendKind::http_nli: return "http_nli";
        case BackendKind::replay: return "replay";
    }
    return "?";
}

inline BackendKind parse_backend_kind(std::string_view name) {
    if (name == "http_lvlm") return BackendKind::http_lvlm;
    if (name == "http_nli") return BackendKind::http_nli;
    if (name == "replay") return BackendKind::replay;
    raise(errc::invalid_config, "unknown backend kind '" + std::string(name) + "'");
}

struct BackendConfig {
    BackendKind kind = BackendKind::replay;
    std::string endpoint_url;            // http kinds
    std::string auth_token_env;          // name of env var holding the bearer token
    double timeout_s = 30.0;
    std::size_t max_retries = 2;
    std::string replay_path;             // replay kind
    std::size_t max_inflight = 4;        // concurrent request bound (http kinds)
    std::size_t retry_backoff_ms = 100;  // initial backoff, doubled per attempt

    void validate() const {
        if (kind != BackendKind::replay && endpoint_url.empty())
            raise(errc::invalid_config, std::string(backend_kind_name(kind)) +
                                            " backend requires endpoint_url");
        if (kind == BackendKind::replay && replay_path.empty())
            raise(errc::invalid_config, "replay backend requires replay_path");
        if (!(timeout_s > 0.0)) raise(errc::invalid_config, "timeout must be > 0");
        if (max_inflight == 0) raise(errc::invalid_config, "max_inflight must be > 0");
    }
};

// Raw label/value rows as returned by an NLI service, before adaptation.
struct RawNliOutput {
    std::vector<std::string> labels;
    std::vector<double> values;
    bool normalized = false;
};

// Adapts raw backend output to a normalized NliTriple. Labels are matched
// case-insensitively; values that already form a distribution pass through,
// anything else goes through a stable softmax. The paper-side contract is a
// probability triple, so this is where logits get reconciled.
inline NliTriple normalize_raw(const RawNliOutput& raw) {
    if (raw.labels.size() != 3 || raw.values.size() != 3)
        raise(errc::malformed_response,
              "expected 3 labels and 3 values, got " + std::to_string(raw.labels.size()) +
                  " labels / " + std::to_string(raw.values.size()) + " values");

    double ent = 0, con = 0, neu = 0;
    bool seen_ent = false, seen_con = false, seen_neu = false;
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = raw.values[i];
        if (!std::isfinite(v))
            raise(errc::malformed_response, "non-finite NLI value for label '" + raw.labels[i] + "'");
        const std::string label = util::to_lower(util::trim(raw.labels[i]));
        if (label == "entailment" && !seen_ent) {
            ent = v;
            seen_ent = true;
        } else if (label == "contradiction" && !seen_con) {
            con = v;
            seen_con = true;
        } else if (label == "neutral" && !seen_neu) {
            neu = v;
            seen_neu = true;
        } else {
            raise(errc::malformed_response, "cannot identify NLI label '" + raw.labels[i] + "'");
        }
    }

    const bool is_distribution = ent >= 0.0 && con >= 0.0 && neu >= 0.0 &&
                                 std::abs(ent + con + neu - 1.0) <= 1e-3;
    NliTriple triple;
    if (is_distribution) {
        triple = {std::min(ent, 1.0), std::min(con, 1.0), std::min(neu, 1.0)};
    } else {
        const double m = std::max({ent, con, neu});
        const double e0 = std::exp(ent - m), e1 = std::exp(con - m), e2 = std::exp(neu - m);
        const double z = e0 + e1 + e2;
        triple = {e0 / z, e1 / z, e2 / z};
    }
    triple.validate();
    return triple;
}

// What a fact backend actually returns; the gateway turns it into a FactSet.
struct FactGeneration {
    std::vector<std::string> facts;
    std::string model_id;
    std::string generation_mode = "diverse_beam_search";
};

struct NliResult {
    NliTriple triple;
    std::string model_id;
};

class FactBackend {
public:
    virtual ~FactBackend() = default;

    // Raw candidates for one image; contract checks live in generate_facts().
    virtual FactGeneration generate(const std::vector<unsigned char>& image_bytes,
                                    const std::string& media_type,
                                    const GenerationParams& params) = 0;

    // Stable identity used in cache keys; changing it invalidates cached facts.
    virtual std::string cache_identity() const = 0;

    std::uint64_t calls() const { return calls_.load(); }

protected:
    std::atomic<std::uint64_t> calls_{0};
};

class NliBackend {
public:
    virtual ~NliBackend() = default;

    // Directed: premise -> hypothesis order is significant.
    virtual NliResult score(const std::string& premise, const std::string& hypothesis) = 0;

    virtual std::string cache_identity() const = 0;

    std::uint64_t calls() const { return calls_.load(); }

protected:
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace rcheck
