#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwos/walk.hpp"

namespace rwos {

/// Upward and downward Feller chains of a finite walk.
struct FellerPair {
    WalkPath up;    // increments X_k with S_k > 0, in order
    WalkPath down;  // increments X_k with S_k <= 0, in order
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::vector<std::uint8_t> indicator;  // 1(S_k > 0), k = 1..n

    nlohmann::json to_json() const;
    static FellerPair from_json(const nlohmann::json& j);
};

FellerPair decompose(const WalkPath& path);
WalkPath recover_reverse_induction(const FellerPair& pair);

enum class SegmentKind { ascending, descending };

struct ChainSegment {
    SegmentKind kind = SegmentKind::ascending;
    std::vector<double> values;      // both endpoints included
    std::vector<double> increments;  // values.size() - 1 entries
    double final_value() const { return values.back(); }
};

/// Split a chain at its future-minimum times (ascending) or future-maximum times (descending).
/// Only the first `horizon` steps of the chain are used.
std::vector<ChainSegment> chain_segments(const WalkPath& chain, SegmentKind kind,
                                         std::size_t horizon = std::numeric_limits<std::size_t>::max());

/// Interleave segments by increasing absolute final value, ascending first on ties.
WalkPath riffle_reconstruct(const std::vector<ChainSegment>& asc, const std::vector<ChainSegment>& desc);

nlohmann::json segments_to_json(const std::vector<ChainSegment>& segs);
std::vector<ChainSegment> segments_from_json(const nlohmann::json& j, SegmentKind kind);

struct LadderRecord {
    std::vector<std::pair<std::size_t, double>> strict_ascending;
    std::vector<std::pair<std::size_t, double>> weak_descending;
};

LadderRecord ladder_variables(const WalkPath& path);

enum class LimitMethod {
    ladder_segments,     // chains built from time-reversed ladder excursions, exact stopping
    walk_decomposition,  // one long walk decomposed, heuristic stopping
};

struct LimitOrderStats {
    std::vector<double> w;  // W_1..W_K
    std::size_t horizon_used = 0;
    std::uint64_t draws = 0;
    bool certified = false;
    double guard = 0.0;
    LimitMethod method = LimitMethod::ladder_segments;

    nlohmann::json to_json() const;
};

/// K smallest values of {S_up[n], n >= 1} and {-S_down[n], n >= 1} together with W_0 = 0.
std::vector<double> smallest_chain_values(const std::vector<double>& up, const std::vector<double>& down,
                                          std::size_t K);

/// W_1..W_K of the limiting order statistics near the minimum.
/// For walk_decomposition, max_horizon bounds the walk length; for ladder_segments it bounds
/// the number of random draws.
LimitOrderStats limit_order_stats(const IncrementSpec& spec, std::size_t K, std::size_t max_horizon, double safety,
                                  std::uint64_t seed, LimitMethod method = LimitMethod::ladder_segments);

/// P(W_1 > w) as the product of the two ladder-height tails.
double w1_tail(const std::function<double(double)>& ladder_tail_up,
               const std::function<double(double)>& ladder_tail_down, double w);

/// Lower bound used for block skipping: a Gaussian block of m steps is skipped only when its
/// start lies at least this many standard deviations times sqrt(m) from the relevance boundary.
inline constexpr double kBlockSkipSigmas = 8.0;

}  // namespace rwos
