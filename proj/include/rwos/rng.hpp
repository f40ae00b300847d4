#pragma once

#include <bit>
#include <cstdint>
#include <limits>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

namespace rwos {

/// SplitMix64, used to expand a 64-bit seed into generator state.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t s) : state_(s) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256++ engine; satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;
    explicit Xoshiro256(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

private:
    std::uint64_t s_[4];
};

/// Seed of replica r under base seed b.
constexpr std::uint64_t replica_seed(std::uint64_t base, std::uint64_t r) { return base ^ r; }

/// Base seed of an independent sub-experiment, so replica streams of different parts do not overlap.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return SplitMix64(base ^ (tag * 0xd1342543de82ef95ULL)).next();
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }
    /// Uniform on [0,1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    /// Uniform on (0,1].
    double uniform_pos() { return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53; }
    double normal() { return normal_(eng_); }
    double exponential() { return exp_(eng_); }
    bool coin() {
        if (nbits_ == 0) {
            buf_ = eng_();
            nbits_ = 64;
        }
        const bool b = buf_ & 1U;
        buf_ >>= 1;
        --nbits_;
        return b;
    }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(eng_()) * n) >> 64);
    }

    Xoshiro256& engine() { return eng_; }

private:
    Xoshiro256 eng_;
    boost::random::normal_distribution<double> normal_;
    boost::random::exponential_distribution<double> exp_;
    std::uint64_t buf_ = 0;
    int nbits_ = 0;
};

}  // namespace rwos
