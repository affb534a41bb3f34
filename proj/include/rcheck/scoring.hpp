// Copyright (C) 2026 RealityCheck contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "rcheck/errors.hpp"
#include "rcheck/types.hpp"

namespace rcheck {

// Weighted combination of one triple: w_ent*ent + w_con*con + w_neu*neu.
inline double combine_scores(const NliTriple& triple, const ScoreWeights& weights) {
    if (!std::isfinite(triple.ent) || !std::isfinite(triple.con) || !std::isfinite(triple.neu))
        raise(errc::invalid_input, "combine_scores: triple has non-finite component");
    weights.validate();
    return weights.w_ent * triple.ent + weights.w_con * triple.con + weights.w_neu * triple.neu;
}

// One value per unordered pair {i, j}: the sum of both directed combined scores.
// Emitted in (i < j) lexicographic order; duplicates from distinct pairs are kept.
inline std::vector<double> symmetric_sums(const NliMatrix& matrix, const ScoreWeights& weights) {
    std::vector<double> sums;
    if (matrix.n < 2) return sums;
    sums.reserve(matrix.n * (matrix.n - 1) / 2);
    for (std::size_t i = 0; i < matrix.n; ++i)
        for (std::size_t j = i + 1; j < matrix.n; ++j)
            sums.push_back(combine_scores(matrix.at(i, j), weights) +
                           combine_scores(matrix.at(j, i), weights));
    return sums;
}

inline double agg_min(std::span<const double> s) {
    if (s.empty()) raise(errc::empty_input, "agg_min over empty score set");
    return *std::min_element(s.begin(), s.end());
}

// Element with the largest absolute value, sign preserved. An exact |v| tie
// between +v and -v resolves to -v: contradiction evidence wins.
inline double agg_absmax(std::span<const double> s) {
    if (s.empty()) raise(errc::empty_input, "agg_absmax over empty score set");
    double best = s[0];
    for (double v : s.subspan(1)) {
        const double av = std::abs(v);
        const double ab = std::abs(best);
        if (av > ab || (av == ab && v < best)) best = v;
    }
    return best;
}

struct Centroids {
    double low = 0.0;
    double high = 0.0;
};

/// Exact 1-D 2-means: the globally optimal (minimum within-cluster sum of
/// squared deviations) bipartition of a 1-D multiset has contiguous clusters
/// in sorted order, so the optimum is found by scanning the n-1 split points
/// of the sorted values with prefix sums. Deterministic, no seed, O(n log n).
/// A singleton or an all-equal multiset yields two identical centroids.
inline Centroids kmeans_1d_two(std::span<const double> s) {
    if (s.empty()) raise(errc::empty_input, "kmeans_1d_two over empty score set");
    std::vector<double> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 1 || v.front() == v.back()) return {v.front(), v.front()};

    std::vector<double> prefix_sum(n + 1, 0.0), prefix_sq(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        prefix_sum[i + 1] = prefix_sum[i] + v[i];
        prefix_sq[i + 1] = prefix_sq[i] + v[i] * v[i];
    }
    const auto sse = [&](std::size_t begin, std::size_t end) {
        const double cnt = static_cast<double>(end - begin);
        const double sum = prefix_sum[end] - prefix_sum[begin];
        const double sq = prefix_sq[end] - prefix_sq[begin];
        return sq - sum * sum / cnt;
    };

    double best_sse = std::numeric_limits<double>::infinity();
    std::size_t best_split = 1;
    for (std::size_t k = 1; k < n; ++k) {
        const double total = sse(0, k) + sse(k, n);
        if (total < best_sse) {
            best_sse = total;
            best_split = k;
        }
    }
    const double low = (prefix_sum[best_split] - prefix_sum[0]) / static_cast<double>(best_split);
    const double high =
        (prefix_sum[n] - prefix_sum[best_split]) / static_cast<double>(n - best_split);
    return {low, high};
}

inline double agg_clust(std::span<const double> s) { return kmeans_1d_two(s).low; }

inline double reduce(std::span<const double> s, Method method) {
    switch (method) {
        case Method::min: return agg_min(s);
        case Method::absmax: return agg_absmax(s);
        case Method::clust: return agg_clust(s);
    }
    raise(errc::invalid_config, "unknown reduction method");
}

// facts -> pairwise scores -> one scalar. Records the symmetric-sum trace.
inline RealityScore reality_check(const NliMatrix& matrix, const ScoreWeights& weights,
                                  Method method, std::string image_id = {}) {
    if (matrix.n < 2)
        raise(errc::invalid_input,
              "reality_check needs at least 2 facts, got " + std::to_string(matrix.n));
    matrix.validate();
    RealityScore score;
    score.image_id = std::move(image_id);
    score.method = method;
    score.weights = weights;
    score.s_nli_values = symmetric_sums(matrix, weights);
    score.value = reduce(score.s_nli_values, method);
    return score;
}

}  // namespace rcheck
