// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <semaphore>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "rcheck/backend.hpp"
#include "rcheck/errors.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

namespace detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // /path, defaults to "/"
};

inline SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        raise(errc::invalid_config, "endpoint_url must include a scheme: " + url);
    const auto path_begin = url.find('/', scheme_end + 3);
    if (path_begin == std::string::npos) return {url, "/"};
    return {url.substr(0, path_begin), url.substr(path_begin)};
}

inline std::size_t backoff_ms(std::size_t initial_ms, std::size_t attempt) {
    thread_local std::mt19937 rng{std::random_device{}()};
    std::uniform_real_distribution<double> jitter(0.5, 1.5);
    const double raw = static_cast<double>(initial_ms) * static_cast<double>(1ull << attempt);
    return static_cast<std::size_t>(std::min(raw * jitter(rng), 2000.0));
}

// POSTs a JSON document, retrying connection failures and retriable statuses
// (5xx, 429) with exponential backoff. Returns the parsed response body.
// The bearer token is read from the configured environment variable and is
// never included in error messages.
class HttpJsonClient {
public:
    explicit HttpJsonClient(BackendConfig config)
        : config_(std::move(config)),
          url_(split_url(config_.endpoint_url)),
          inflight_(static_cast<std::ptrdiff_t>(config_.max_inflight)) {
        config_.validate();
    }

    json post(const json& body) {
        const std::string payload = body.dump();
        std::string last_failure = "no attempt made";
        for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(backoff_ms(config_.retry_backoff_ms, attempt - 1)));
            auto res = issue(payload);
            if (!res) {
                last_failure = "connection failed: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                json parsed = json::parse(res->body, nullptr, false);
                if (parsed.is_discarded())
                    raise(errc::malformed_response,
                          "backend " + config_.endpoint_url + " returned unparseable JSON");
                return parsed;
            }
            if (res->status >= 500 || res->status == 429) {
                last_failure = "status " + std::to_string(res->status);
                continue;
            }
            raise(errc::transport, "backend " + config_.endpoint_url + " returned status " +
                                       std::to_string(res->status));
        }
        raise(errc::transport, "backend " + config_.endpoint_url + " unreachable after " +
                                   std::to_string(config_.max_retries + 1) +
                                   " attempts (" + last_failure + ")");
    }

private:
    httplib::Result issue(const std::string& payload) {
        inflight_.acquire();
        struct Release {
            std::counting_semaphore<>& sem;
            ~Release() { sem.release(); }
        } release{inflight_};

        // one client per request: keeps concurrent calls independent
        httplib::Client client(url_.origin);
        const auto timeout = std::chrono::duration<double>(config_.timeout_s);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers headers;
        if (!config_.auth_token_env.empty()) {
            if (const char* token = std::getenv(config_.auth_token_env.c_str());
                token != nullptr && *token != '\0')
                headers.emplace("Authorization", std::string("Bearer ") + token);
        }
        return client.Post(url_.path, headers, payload, "application/json");
    }

    BackendConfig config_;
    SplitUrl url_;
    std::counting_semaphore<> inflight_;
};

}  // namespace detail

class HttpLvlmBackend final : public FactBackend {
public:
    explicit HttpLvlmBackend(BackendConfig config)
        : endpoint_(config.endpoint_url), client_(std::move(config)) {}

    FactGeneration generate(const std::vector<unsigned char>& image_bytes,
                            const std::string& media_type,
                            const GenerationParams& params) override {
        calls_.fetch_add(1);
        const json body{{"image_b64", util::base64_encode(image_bytes.data(), image_bytes.size())},
                        {"media_type", media_type},
                        {"prompt", params.prompt},
                        {"num_return_sequences", params.num_facts},
                        {"num_beams", params.num_beams},
                        {"num_beam_groups", params.num_beam_groups},
                        {"diversity_penalty", params.diversity_penalty}};
        const json res = client_.post(body);
        if (!res.is_object() || !res.contains("facts") || !res.at("facts").is_array())
            raise(errc::malformed_response, "LVLM response missing 'facts' array");
        FactGeneration out;
        for (const auto& f : res.at("facts")) {
            if (!f.is_string())
                raise(errc::malformed_response, "LVLM response contains a non-string fact");
            out.facts.push_back(f.get<std::string>());
        }
        out.model_id = res.value("model_id", std::string{});
        out.generation_mode = res.value("generation_mode", "diverse_beam_search");
        return out;
    }

    std::string cache_identity() const override { return "http:" + endpoint_; }

private:
    std::string endpoint_;
    detail::HttpJsonClient client_;
};

class HttpNliBackend final : public NliBackend {
public:
    explicit HttpNliBackend(BackendConfig config)
        : endpoint_(config.endpoint_url), client_(std::move(config)) {}

    NliResult score(const std::string& premise, const std::string& hypothesis) override {
        calls_.fetch_add(1);
        const json res = client_.post(json{{"premise", premise}, {"hypothesis", hypothesis}});
        if (!res.is_object() || !res.contains("labels") || !res.contains("scores"))
            raise(errc::malformed_response, "NLI response missing 'labels'/'scores'");
        RawNliOutput raw;
        raw.labels = res.at("labels").get<std::vector<std::string>>();
        raw.values = res.at("scores").get<std::vector<double>>();
        raw.normalized = res.value("normalized", false);
        return {normalize_raw(raw), res.value("model_id", std::string{})};
    }

    std::string cache_identity() const override { return "http:" + endpoint_; }

private:
    std::string endpoint_;
    detail::HttpJsonClient client_;
};

}  // namespace rcheck
