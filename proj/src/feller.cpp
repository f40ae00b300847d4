#include "rwos/feller.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "rwos/error.hpp"

namespace rwos {

// ---------------------------------------------------------------------------
// Decomposition and reverse-induction recovery
// ---------------------------------------------------------------------------

FellerPair decompose(const WalkPath& path) {
    const auto& s = path.sums();
    const auto& x = path.increments();
    std::vector<double> up, down;
    FellerPair p;
    p.indicator.resize(x.size());
    for (std::size_t k = 1; k <= x.size(); ++k) {
        const bool pos = s[k] > 0;
        p.indicator[k - 1] = pos ? 1 : 0;
        (pos ? up : down).push_back(x[k - 1]);
    }
    p.n_plus = up.size();
    p.n_minus = down.size();
    p.up = WalkPath(std::move(up));
    p.down = WalkPath(std::move(down));
    return p;
}

WalkPath recover_reverse_induction(const FellerPair& pair) {
    const std::size_t np0 = pair.up.size(), nm0 = pair.down.size();
    if (pair.n_plus != np0 || pair.n_minus != nm0)
        throw Error(Status::inconsistent, "chain lengths disagree with the recorded counts");
    const std::size_t n = np0 + nm0;
    const bool have_ind = !pair.indicator.empty();
    if (have_ind) {
        if (pair.indicator.size() != n) throw Error(Status::inconsistent, "indicator length differs from n");
        const auto ones = static_cast<std::size_t>(std::count(pair.indicator.begin(), pair.indicator.end(), 1));
        if (ones != np0) throw Error(Status::inconsistent, "indicator count differs from n_plus");
    }
    // Prefix sums of |X| bound the rounding error of the recombined partial sums.
    auto abs_prefix = [](const std::vector<double>& v) {
        std::vector<double> a(v.size() + 1, 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) a[i + 1] = a[i] + std::abs(v[i]);
        return a;
    };
    const auto au = abs_prefix(pair.up.increments());
    const auto ad = abs_prefix(pair.down.increments());
    const auto& su = pair.up.sums();
    const auto& sd = pair.down.sums();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> inc(n);
    std::size_t np = np0, nm = nm0;
    for (std::size_t k = n; k >= 1; --k) {
        const double s = su[np] + sd[nm];
        const double tol = 2.0 * eps * static_cast<double>(k + 2) * (au[np] + ad[nm]);
        bool pos;
        if (std::abs(s) > tol) {
            pos = s > 0;
            if (have_ind && pos != (pair.indicator[k - 1] == 1))
                throw Error(Status::inconsistent, "sign of recombined sum contradicts the indicator at step " +
                                                      std::to_string(k));
        } else {
            pos = have_ind ? pair.indicator[k - 1] == 1 : s > 0;
        }
        if (pos) {
            if (np == 0) throw Error(Status::inconsistent, "upward chain exhausted at step " + std::to_string(k));
            inc[k - 1] = pair.up.increments()[--np];
        } else {
            if (nm == 0) throw Error(Status::inconsistent, "downward chain exhausted at step " + std::to_string(k));
            inc[k - 1] = pair.down.increments()[--nm];
        }
    }
    return WalkPath(std::move(inc));
}

nlohmann::json FellerPair::to_json() const {
    std::vector<int> ind(indicator.begin(), indicator.end());
    return {{"up", up.increments()},   {"down", down.increments()}, {"up_values", up.sums()},
            {"down_values", down.sums()}, {"n_plus", n_plus},         {"n_minus", n_minus},
            {"indicator", ind}};
}

FellerPair FellerPair::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("up") && j.contains("down"), "feller pair JSON needs up and down");
    FellerPair p;
    p.up = WalkPath(j.at("up").get<std::vector<double>>());
    p.down = WalkPath(j.at("down").get<std::vector<double>>());
    p.n_plus = j.value("n_plus", p.up.size());
    p.n_minus = j.value("n_minus", p.down.size());
    if (j.contains("indicator"))
        for (int b : j.at("indicator").get<std::vector<int>>()) {
            require(b == 0 || b == 1, "indicator entries must be 0 or 1");
            p.indicator.push_back(static_cast<std::uint8_t>(b));
        }
    return p;
}

// ---------------------------------------------------------------------------
// Chain segments and riffle reconstruction
// ---------------------------------------------------------------------------

std::vector<ChainSegment> chain_segments(const WalkPath& chain, SegmentKind kind, std::size_t horizon) {
    const auto& v = chain.sums();
    const auto& x = chain.increments();
    const std::size_t N = std::min(horizon, chain.size());
    std::vector<ChainSegment> out;
    if (N == 0) return out;
    // best[i]: last index in [i, N] attaining the min (ascending) or max (descending).
    std::vector<std::size_t> best(N + 2);
    best[N] = N;
    for (std::size_t i = N; i-- > 1;) {
        const std::size_t b = best[i + 1];
        const bool better = kind == SegmentKind::ascending ? v[i] < v[b] : v[i] > v[b];
        best[i] = better ? i : b;
    }
    std::size_t g = 0;
    while (g < N) {
        const std::size_t next = best[g + 1];
        ChainSegment seg;
        seg.kind = kind;
        seg.values.assign(v.begin() + static_cast<std::ptrdiff_t>(g), v.begin() + static_cast<std::ptrdiff_t>(next) + 1);
        seg.increments.assign(x.begin() + static_cast<std::ptrdiff_t>(g), x.begin() + static_cast<std::ptrdiff_t>(next));
        out.push_back(std::move(seg));
        g = next;
    }
    return out;
}

namespace {

void check_segments(const std::vector<ChainSegment>& segs, SegmentKind kind) {
    const char* name = kind == SegmentKind::ascending ? "ascending" : "descending";
    double prev = 0.0;
    for (std::size_t j = 0; j < segs.size(); ++j) {
        const auto& s = segs[j];
        require(s.kind == kind, std::string("segment of wrong kind in the ") + name + " list");
        require(s.values.size() >= 2 && s.increments.size() + 1 == s.values.size(),
                std::string("malformed ") + name + " segment");
        require(s.values.front() == prev, std::string(name) + " segments are not contiguous");
        const double f = s.final_value();
        if (kind == SegmentKind::ascending)
            require(f > prev, "ascending segment finals must strictly increase");
        else
            require(j == 0 ? f <= prev : f < prev, "descending segment finals must decrease");
        prev = f;
    }
}

}  // namespace

WalkPath riffle_reconstruct(const std::vector<ChainSegment>& asc, const std::vector<ChainSegment>& desc) {
    check_segments(asc, SegmentKind::ascending);
    check_segments(desc, SegmentKind::descending);
    std::vector<double> inc;
    std::size_t i = 0, j = 0;
    while (i < asc.size() || j < desc.size()) {
        bool take_asc;
        if (i == asc.size()) take_asc = false;
        else if (j == desc.size()) take_asc = true;
        else take_asc = std::abs(asc[i].final_value()) <= std::abs(desc[j].final_value());
        const auto& seg = take_asc ? asc[i++] : desc[j++];
        inc.insert(inc.end(), seg.increments.begin(), seg.increments.end());
    }
    return WalkPath(std::move(inc));
}

nlohmann::json segments_to_json(const std::vector<ChainSegment>& segs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : segs)
        arr.push_back({{"kind", s.kind == SegmentKind::ascending ? "ascending" : "descending"},
                       {"values", s.values},
                       {"increments", s.increments},
                       {"final", s.final_value()}});
    return arr;
}

std::vector<ChainSegment> segments_from_json(const nlohmann::json& j, SegmentKind kind) {
    require(j.is_array(), "segments JSON must be an array");
    std::vector<ChainSegment> out;
    for (const auto& e : j) {
        ChainSegment s;
        s.kind = kind;
        s.increments = e.at("increments").get<std::vector<double>>();
        if (e.contains("values")) {
            s.values = e.at("values").get<std::vector<double>>();
        } else {
            require(false, "segment JSON needs values");
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ladder variables
// ---------------------------------------------------------------------------

LadderRecord ladder_variables(const WalkPath& path) {
    const auto& s = path.sums();
    LadderRecord r;
    double hi = s[0], lo = s[0];
    for (std::size_t k = 1; k < s.size(); ++k) {
        if (s[k] > hi) r.strict_ascending.emplace_back(k, s[k]);
        if (s[k] <= lo) r.weak_descending.emplace_back(k, s[k]);
        hi = std::max(hi, s[k]);
        lo = std::min(lo, s[k]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Limiting order statistics
// ---------------------------------------------------------------------------

std::vector<double> smallest_chain_values(const std::vector<double>& up, const std::vector<double>& down,
                                          std::size_t K) {
    std::vector<double> all;
    all.reserve(up.size() + down.size());
    for (std::size_t i = 1; i < up.size(); ++i) all.push_back(up[i]);
    for (double d : down) all.push_back(-d);
    const std::size_t m = std::min(all.size(), K + 1);
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end());
    if (m <= 1) return {};
    return std::vector<double>(all.begin() + 1, all.begin() + static_cast<std::ptrdiff_t>(m));
}

namespace {

/// The k smallest values pushed so far.
class SmallestK {
public:
    explicit SmallestK(std::size_t k) : k_(k) {}
    void push(double v) {
        if (heap_.size() < k_) {
            heap_.push(v);
        } else if (v < heap_.top()) {
            heap_.pop();
            heap_.push(v);
        }
    }
    bool full() const { return heap_.size() == k_; }
    double threshold() const { return full() ? heap_.top() : std::numeric_limits<double>::infinity(); }
    std::vector<double> sorted() const {
        auto h = heap_;
        std::vector<double> v;
        while (!h.empty()) {
            v.push_back(h.top());
            h.pop();
        }
        std::reverse(v.begin(), v.end());
        return v;
    }

private:
    std::size_t k_;
    std::priority_queue<double> heap_;
};

/// Simulates both Feller chains as concatenations of time-reversed ladder excursions and
/// keeps only chain values that can still be among the K+1 smallest.
class LadderChains {
public:
    LadderChains(const IncrementSpec& spec, std::size_t K, std::uint64_t budget, Rng& rng)
        : spec_(spec), K_(K), budget_(budget), rng_(rng), top_(K + 1) {
        lattice_ = spec.kind() == IncrementSpec::Kind::simple_symmetric;
        gauss_ = spec.kind() == IncrementSpec::Kind::gaussian;
        sigma_ = gauss_ ? spec.sigma() : 0.0;
        top_.push(0.0);
    }

    LimitOrderStats run() {
        double up_level = 0.0, down_level = 0.0;
        bool up_done = false, down_done = false, ok = true;
        while (ok && !(up_done && down_done)) {
            if (!up_done) {
                if (top_.full() && up_level >= top_.threshold()) up_done = true;
                else ok = up_excursion(up_level);
            }
            if (ok && !down_done) {
                if (top_.full() && down_level >= top_.threshold()) down_done = true;
                else ok = down_excursion(down_level);
            }
        }
        LimitOrderStats r;
        r.method = LimitMethod::ladder_segments;
        auto v = top_.sorted();
        r.w.assign(v.begin() + 1, v.end());
        r.certified = up_done && down_done;
        r.horizon_used = time_;
        r.draws = draws_;
        r.guard = std::min(up_level, down_level);
        return r;
    }

private:
    double step() { return spec_.draw(rng_); }

    /// Strictly ascending ladder excursion, reversed onto the upward chain at `base`.
    bool up_excursion(double& base) {
        std::priority_queue<double, std::vector<double>, std::greater<>> largest;
        buf_.clear();
        auto cutoff = [&] {
            double c = -std::numeric_limits<double>::infinity();
            if (largest.size() == K_ + 1) c = largest.top();
            if (top_.full()) c = std::max(c, base - top_.threshold());
            return c;
        };
        auto record = [&](double si) {
            if (si <= cutoff()) return;
            buf_.push_back(si);
            if (largest.size() < K_ + 1) {
                largest.push(si);
            } else if (si > largest.top()) {
                largest.pop();
                largest.push(si);
            }
        };
        double s = 0.0;
        record(0.0);
        for (;;) {
            if (draws_ >= budget_) return false;
            const double c = cutoff();
            if (gauss_ && s < c - kBlockSkipSigmas * sigma_) {
                const double m = std::floor(std::pow((c - s) / (kBlockSkipSigmas * sigma_), 2));
                s += sigma_ * std::sqrt(m) * rng_.normal();
                time_ += static_cast<std::size_t>(m);
                ++draws_;
                continue;
            }
            s += step();
            ++draws_;
            ++time_;
            if (s > 0) break;
            if (lattice_) {
                const double lowest = std::floor(c) + 1.0;
                if (s < lowest) s = std::min(lowest, 0.0);
            }
            record(s);
        }
        const double thr = top_.threshold();
        for (double si : buf_) {
            const double v = base + s - si;
            if (v < thr) top_.push(v);
        }
        base += s;
        return true;
    }

    /// Weakly descending ladder excursion, reversed onto the negated downward chain at `level`.
    bool down_excursion(double& level) {
        std::priority_queue<double> smallest;
        buf_.clear();
        auto cutoff = [&] {
            double c = std::numeric_limits<double>::infinity();
            if (smallest.size() == K_ + 1) c = smallest.top();
            if (top_.full()) c = std::min(c, top_.threshold() - level);
            return c;
        };
        auto record = [&](double si) {
            if (si >= cutoff()) return;
            buf_.push_back(si);
            if (smallest.size() < K_ + 1) {
                smallest.push(si);
            } else if (si < smallest.top()) {
                smallest.pop();
                smallest.push(si);
            }
        };
        double s = 0.0;
        record(0.0);
        for (;;) {
            if (draws_ >= budget_) return false;
            const double c = cutoff();
            if (gauss_ && s > c + kBlockSkipSigmas * sigma_) {
                const double m = std::floor(std::pow((s - c) / (kBlockSkipSigmas * sigma_), 2));
                s += sigma_ * std::sqrt(m) * rng_.normal();
                time_ += static_cast<std::size_t>(m);
                ++draws_;
                continue;
            }
            s += step();
            ++draws_;
            ++time_;
            if (s <= 0) break;
            if (lattice_) {
                const double highest = std::ceil(c) - 1.0;
                if (s > highest) {
                    s = std::max(highest, 0.0);
                    if (s <= 0) break;
                }
            }
            record(s);
        }
        const double thr = top_.threshold();
        for (double si : buf_) {
            const double v = level - s + si;
            if (v < thr) top_.push(v);
        }
        level -= s;
        return true;
    }

    const IncrementSpec& spec_;
    std::size_t K_;
    std::uint64_t budget_;
    Rng& rng_;
    SmallestK top_;
    bool lattice_ = false, gauss_ = false;
    double sigma_ = 0.0;
    std::uint64_t draws_ = 0;
    std::size_t time_ = 0;
    std::vector<double> buf_;
};

LimitOrderStats limit_by_walk(const IncrementSpec& comp, std::size_t K, std::size_t max_horizon, double safety,
                              Rng& rng) {
    std::vector<double> inc;
    std::size_t n = std::max<std::size_t>(64, 4 * K);
    LimitOrderStats r;
    r.method = LimitMethod::walk_decomposition;
    for (;;) {
        n = std::min(n, max_horizon);
        while (inc.size() < n) inc.push_back(comp.draw(rng));
        const FellerPair p = decompose(WalkPath(inc));
        const auto& up = p.up.sums();
        const auto& down = p.down.sums();
        r.w = smallest_chain_values(up, down, K);
        r.horizon_used = n;
        r.draws = n;
        r.certified = false;
        if (r.w.size() == K && up.size() > 1 && down.size() > 1) {
            const double wk = r.w.back();
            auto trailing_min = [](const std::vector<double>& v, double sign) {
                double m = std::numeric_limits<double>::infinity();
                for (std::size_t i = v.size() / 2; i < v.size(); ++i) m = std::min(m, sign * v[i]);
                return m;
            };
            const double up_end = up.back(), down_end = -down.back();
            r.guard = std::min(trailing_min(up, 1.0), trailing_min(down, -1.0));
            r.certified = up_end >= safety * wk && down_end >= safety * wk && r.guard >= wk;
        }
        if (r.certified || n == max_horizon) return r;
        n *= 2;
    }
}

}  // namespace

LimitOrderStats limit_order_stats(const IncrementSpec& spec, std::size_t K, std::size_t max_horizon, double safety,
                                  std::uint64_t seed, LimitMethod method) {
    require(K >= 1, "K must be at least 1");
    require(max_horizon >= K, "max_horizon must be at least K");
    require(safety >= 1.0, "safety factor must be at least 1");
    require(!spec.has_drift(), "limit order statistics need centered increments (nonzero drift rejected)");
    Rng rng(seed);
    const IncrementSpec& comp = spec.pick(rng);
    if (method == LimitMethod::walk_decomposition) return limit_by_walk(comp, K, max_horizon, safety, rng);
    LadderChains chains(comp, K, max_horizon, rng);
    return chains.run();
}

nlohmann::json LimitOrderStats::to_json() const {
    return {{"w", w},
            {"horizon_used", horizon_used},
            {"draws", draws},
            {"certified", certified},
            {"guard", guard},
            {"method", method == LimitMethod::ladder_segments ? "ladder-segments" : "walk-decomposition"}};
}

double w1_tail(const std::function<double(double)>& ladder_tail_up,
               const std::function<double(double)>& ladder_tail_down, double w) {
    require(w > 0, "w must be positive");
    const double a = ladder_tail_up(w), b = ladder_tail_down(w);
    require(a >= 0 && a <= 1 && b >= 0 && b <= 1, "tails must be probabilities");
    return a * b;
}

}  // namespace rwos
