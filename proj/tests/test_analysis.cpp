// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "rcheck/analysis.hpp"

using namespace rcheck;
using Catch::Approx;

namespace {

FactSet facts_of(std::vector<std::string> facts) {
    FactSet f;
    f.image_id = "img";
    f.facts = std::move(facts);
    f.model_id = "m";
    return f;
}

}  // namespace

TEST_CASE("detect_markers") {
    SECTION("the canonical weird-image fact trips the digital marker") {
        CHECK(detect_markers(facts_of({"The camel is in the desert",
                                       "The camels are standing in the desert",
                                       "This is a digitally manipulated image of a camel with "
                                       "two heads"})));
    }
    SECTION("plain descriptive facts do not") {
        CHECK_FALSE(detect_markers(facts_of(
            {"This is a camel", "The camel is standing on sand",
             "This image features a camel standing on a sandy desert plain"})));
    }
    SECTION("multiple markers in one fact") {
        CHECK(detect_markers(facts_of({"artistic rendering of a cat", "a cat"})));
    }
    SECTION("matching is case-insensitive") {
        CHECK(detect_markers(facts_of({"A DIGITAL collage", "x"})));
        CHECK(detect_markers(facts_of({"An Artistic shot", "x"})));
    }
    SECTION("marker must start a token") {
        CHECK_FALSE(detect_markers(facts_of({"the bidigital apparatus", "x"})));
        CHECK(detect_markers(facts_of({"renderings of a bridge", "x"})));
    }
    SECTION("order of facts does not matter") {
        auto a = facts_of({"a cat", "a digital cat"});
        auto b = facts_of({"a digital cat", "a cat"});
        CHECK(detect_markers(a) == detect_markers(b));
    }
    SECTION("custom marker list") {
        const std::vector<std::string> markers{"cartoon"};
        CHECK(detect_markers(facts_of({"a cartoonish drawing", "x"}), markers));
        CHECK_FALSE(detect_markers(facts_of({"a digital photo", "x"}), markers));
    }
}

TEST_CASE("predict_weird_in_pair") {
    const PairRecord pair{"p0", "real-0", "weird-0"};
    SECTION("lower score is predicted weird") {
        ScoreMap scores{{"real-0", 0.8}, {"weird-0", -1.2}};
        const auto pred = predict_weird_in_pair(pair, scores);
        CHECK(pred.for_real_image == Prediction::real);
        CHECK(pred.for_weird_image == Prediction::weird);
    }
    SECTION("inverted scores predict the real image weird") {
        ScoreMap scores{{"real-0", -2.0}, {"weird-0", 0.1}};
        const auto pred = predict_weird_in_pair(pair, scores);
        CHECK(pred.for_real_image == Prediction::weird);
        CHECK(pred.for_weird_image == Prediction::real);
    }
    SECTION("equal scores leave both undecided") {
        ScoreMap scores{{"real-0", 0.4}, {"weird-0", 0.4}};
        const auto pred = predict_weird_in_pair(pair, scores);
        CHECK(pred.for_real_image == Prediction::undecided);
        CHECK(pred.for_weird_image == Prediction::undecided);
    }
    SECTION("missing score is an evaluation error") {
        ScoreMap scores{{"real-0", 0.4}};
        CHECK_THROWS_AS(predict_weird_in_pair(pair, scores), error);
    }
    SECTION("planted batch matches hand labeling") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        for (int k = 0; k < 10; ++k) {
            const PairRecord p{"p", "r", "w"};
            const double gap = u(rng);
            const double base = u(rng) - 1.0;
            ScoreMap scores{{"r", base + gap}, {"w", base}};
            const auto pred = predict_weird_in_pair(p, scores);
            CHECK(pred.for_real_image == Prediction::real);
            CHECK(pred.for_weird_image == Prediction::weird);
        }
    }
}

TEST_CASE("conditional_report") {
    SECTION("count ratio with support") {
        std::vector<AnalysisRecord> records;
        for (int i = 0; i < 4; ++i)
            records.push_back({"d" + std::to_string(i),
                               {true, std::nullopt},
                               i < 3 ? Prediction::weird : Prediction::real});
        const auto report = conditional_report(records);
        REQUIRE(report.given_digital.has_value());
        CHECK(report.given_digital->probability == 0.75);
        CHECK(report.given_digital->support == 4);
        CHECK(report.given_digital->predicted_weird == 3);
        CHECK_FALSE(report.given_hallucination.has_value());
        CHECK_FALSE(report.given_both.has_value());
    }
    SECTION("zero-support conditional is absent, not zero") {
        std::vector<AnalysisRecord> records{
            {"a", {false, false}, Prediction::weird},
            {"b", {false, std::nullopt}, Prediction::real},
        };
        const auto report = conditional_report(records);
        CHECK_FALSE(report.given_digital.has_value());
        CHECK_FALSE(report.given_hallucination.has_value());
        CHECK_FALSE(report.given_both.has_value());
    }
    SECTION("undecided records are excluded and counted") {
        std::vector<AnalysisRecord> records{
            {"a", {true, true}, Prediction::weird},
            {"b", {true, true}, Prediction::undecided},
        };
        const auto report = conditional_report(records);
        CHECK(report.undecided == 1);
        REQUIRE(report.given_both.has_value());
        CHECK(report.given_both->support == 1);
        CHECK(report.given_both->probability == 1.0);
    }
    SECTION("hand-labeled 20-record fixture") {
        // 12 digital (9 weird), 10 hallucination (8 weird), 6 both (5 weird)
        std::vector<AnalysisRecord> records;
        std::size_t digital_weird = 0, hall_weird = 0, both_weird = 0;
        std::size_t digital_n = 0, hall_n = 0, both_n = 0;
        for (int i = 0; i < 20; ++i) {
            AnalysisRecord r;
            r.image_id = "img-" + std::to_string(i);
            r.flags.digital = i < 12;
            r.flags.hallucination = (i >= 6 && i < 16);
            r.prediction = (i % 4 == 3) ? Prediction::real : Prediction::weird;
            records.push_back(r);
            const bool weird = r.prediction == Prediction::weird;
            if (r.flags.digital) {
                ++digital_n;
                digital_weird += weird;
            }
            if (*r.flags.hallucination) {
                ++hall_n;
                hall_weird += weird;
            }
            if (r.flags.digital && *r.flags.hallucination) {
                ++both_n;
                both_weird += weird;
            }
        }
        const auto report = conditional_report(records);
        REQUIRE(report.given_digital.has_value());
        REQUIRE(report.given_hallucination.has_value());
        REQUIRE(report.given_both.has_value());
        CHECK(report.given_digital->probability ==
              static_cast<double>(digital_weird) / static_cast<double>(digital_n));
        CHECK(report.given_hallucination->probability ==
              static_cast<double>(hall_weird) / static_cast<double>(hall_n));
        CHECK(report.given_both->probability ==
              static_cast<double>(both_weird) / static_cast<double>(both_n));
        CHECK(report.given_digital->support == digital_n);
        CHECK(report.given_hallucination->support == hall_n);
        CHECK(report.given_both->support == both_n);
    }
}

TEST_CASE("annotations file") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() /
                     ("rcheck_ann_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    const auto file = dir / "annotations.jsonl";
    {
        std::ofstream out(file);
        out << R"({"image_id": "a", "hallucination": true})" << "\n";
        out << R"({"image_id": "b", "hallucination": false})" << "\n";
    }
    const auto annotations = load_annotations(file);
    REQUIRE(annotations.size() == 2);
    CHECK(annotations.at("a") == true);
    CHECK(annotations.at("b") == false);
    CHECK_THROWS_AS(load_annotations(dir / "missing.jsonl"), error);
    fs::remove_all(dir);
}
