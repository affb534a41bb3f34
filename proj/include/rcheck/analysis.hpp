// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rcheck/errors.hpp"
#include "rcheck/eval.hpp"
#include "rcheck/json_io.hpp"
#include "rcheck/types.hpp"
#include "rcheck/util.hpp"

namespace rcheck {

// Generator vocabulary that empirically signals the model perceived the
// image as synthetic. "digital" also matches "digitally": a marker matches
// any token it prefixes, case-insensitively.
inline const std::vector<std::string>& default_marker_words() {
    static const std::vector<std::string> markers{"digital", "artistic", "rendering"};
    return markers;
}

inline bool detect_markers(const FactSet& facts,
                           std::span<const std::string> markers = default_marker_words()) {
    for (const auto& fact : facts.facts) {
        const std::string lower = util::to_lower(fact);
        std::size_t i = 0;
        while (i < lower.size()) {
            while (i < lower.size() && !std::isalnum(static_cast<unsigned char>(lower[i]))) ++i;
            std::size_t begin = i;
            while (i < lower.size() && std::isalnum(static_cast<unsigned char>(lower[i]))) ++i;
            if (begin == i) continue;
            const std::string_view token(lower.data() + begin, i - begin);
            for (const auto& marker : markers)
                if (token.substr(0, marker.size()) == marker) return true;
        }
    }
    return false;
}

enum class Prediction { real, weird, undecided };

inline std::string_view prediction_name(Prediction p) {
    switch (p) {
        case Prediction::real: return "real";
        case Prediction::weird: return "weird";
        case Prediction::undecided: return "undecided";
    }
    return "?";
}

struct PairPrediction {
    Prediction for_real_image = Prediction::undecided;   // the pair's annotated real image
    Prediction for_weird_image = Prediction::undecided;  // the pair's annotated weird image
};

// Within-pair decision rule: strictly lower score is predicted weird. Equal
// scores leave both images undecided; they are excluded from conditionals
// but counted.
inline PairPrediction predict_weird_in_pair(const PairRecord& pair, const ScoreMap& scores) {
    const auto real = scores.find(pair.real_image_id);
    if (real == scores.end())
        raise(errc::evaluation_input, "no score for image '" + pair.real_image_id + "'");
    const auto weird = scores.find(pair.weird_image_id);
    if (weird == scores.end())
        raise(errc::evaluation_input, "no score for image '" + pair.weird_image_id + "'");
    if (real->second == weird->second) return {Prediction::undecided, Prediction::undecided};
    if (real->second > weird->second) return {Prediction::real, Prediction::weird};
    return {Prediction::weird, Prediction::real};
}

struct AnalysisFlags {
    bool digital = false;
    std::optional<bool> hallucination;  // human-annotated, may be absent
};

struct AnalysisRecord {
    std::string image_id;
    AnalysisFlags flags;
    Prediction prediction = Prediction::undecided;
};

struct ConditionalEntry {
    double probability = 0.0;
    std::size_t predicted_weird = 0;  // joint count
    std::size_t support = 0;          // condition count
};

struct ConditionalReport {
    std::optional<ConditionalEntry> given_digital;
    std::optional<ConditionalEntry> given_hallucination;
    std::optional<ConditionalEntry> given_both;
    std::size_t records = 0;
    std::size_t undecided = 0;
};

// Exact count-ratio conditionals over decided records; a condition with zero
// support yields an absent entry, never a zero.
inline ConditionalReport conditional_report(std::span<const AnalysisRecord> records) {
    ConditionalReport report;
    report.records = records.size();
    std::size_t digital_n = 0, digital_weird = 0;
    std::size_t hall_n = 0, hall_weird = 0;
    std::size_t both_n = 0, both_weird = 0;
    for (const auto& r : records) {
        if (r.prediction == Prediction::undecided) {
            ++report.undecided;
            continue;
        }
        const bool weird = r.prediction == Prediction::weird;
        if (r.flags.digital) {
            ++digital_n;
            digital_weird += weird ? 1 : 0;
        }
        const bool hallucinated = r.flags.hallucination.value_or(false);
        if (hallucinated) {
            ++hall_n;
            hall_weird += weird ? 1 : 0;
        }
        if (r.flags.digital && hallucinated) {
            ++both_n;
            both_weird += weird ? 1 : 0;
        }
    }
    const auto entry = [](std::size_t joint, std::size_t support) -> std::optional<ConditionalEntry> {
        if (support == 0) return std::nullopt;
        return ConditionalEntry{static_cast<double>(joint) / static_cast<double>(support), joint,
                                support};
    };
    report.given_digital = entry(digital_weird, digital_n);
    report.given_hallucination = entry(hall_weird, hall_n);
    report.given_both = entry(both_weird, both_n);
    return report;
}

inline void to_json(json& j, const ConditionalEntry& e) {
    j = json{{"probability", e.probability},
             {"predicted_weird", e.predicted_weird},
             {"support", e.support}};
}

inline void to_json(json& j, const ConditionalReport& r) {
    const auto put = [](const std::optional<ConditionalEntry>& e) {
        return e ? json(*e) : json(nullptr);
    };
    j = json{{"p_weird_given_digital", put(r.given_digital)},
             {"p_weird_given_hallucination", put(r.given_hallucination)},
             {"p_weird_given_both", put(r.given_both)},
             {"records", r.records},
             {"undecided", r.undecided}};
}

// {"image_id": ..., "hallucination": ...} JSON Lines, as produced by a human
// annotation pass.
inline std::unordered_map<std::string, bool> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) raise(errc::input, "annotations file not readable: " + path.string());
    std::unordered_map<std::string, bool> annotations;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            raise(errc::input, "annotations file " + path.string() + ": unparseable line " +
                                   std::to_string(line_no));
        annotations[j.at("image_id").get<std::string>()] = j.at("hallucination").get<bool>();
    }
    return annotations;
}

inline std::string conditional_report_markdown(const ConditionalReport& report) {
    std::ostringstream out;
    out << "| Measure | Value | Support |\n|---|---|---|\n";
    const auto row = [&](const char* name, const std::optional<ConditionalEntry>& e) {
        out << "| " << name << " | ";
        if (e)
            out << std::fixed << std::setprecision(2) << e->probability << " | " << e->support
                << " |\n";
        else
            out << "n/a | 0 |\n";
    };
    row("P(weird | digital)", report.given_digital);
    row("P(weird | hallucination)", report.given_hallucination);
    row("P(weird | hallucination & digital)", report.given_both);
    out << "\nRecords: " << report.records << ", undecided: " << report.undecided << "\n";
    return out.str();
}

}  // namespace rcheck
