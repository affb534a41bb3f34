// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace rcheck {

enum class errc {
    invalid_input,       // non-finite or contract-violating values
    empty_input,         // reduction over an empty collection
    incomplete_matrix,   // missing ordered-pair entry
    insufficient_facts,  // backend returned fewer candidates than requested
    malformed_response,  // backend payload cannot be interpreted
    transport,           // backend unreachable / non-success status after retries
    cache_integrity,     // cache record cannot be decoded
    input,               // unreadable or inconsistent user input (files, manifests)
    evaluation_input,    // evaluation references data that is not available
    invalid_config,      // configuration contract violation
    batch,               // whole-batch failure (empty manifest, all images failed)
};

inline const char* errc_name(errc code) {
    switch (code) {
        case errc::invalid_input: return "invalid_input";
        case errc::empty_input: return "empty_input";
        case errc::incomplete_matrix: return "incomplete_matrix";
        case errc::insufficient_facts: return "insufficient_facts";
        case errc::malformed_response: return "malformed_response";
        case errc::transport: return "transport";
        case errc::cache_integrity: return "cache_integrity";
        case errc::input: return "input";
        case errc::evaluation_input: return "evaluation_input";
        case errc::invalid_config: return "invalid_config";
        case errc::batch: return "batch";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw error(code, message);
}

}  // namespace rcheck
