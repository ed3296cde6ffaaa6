#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace contpol {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).  A stream is
// identified by (key, stream id); draws within a stream walk the low counter
// words.  Streams with distinct ids are statistically independent, so parallel
// rollouts can each own a stream and produce results that do not depend on the
// thread schedule.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
    static constexpr int kRounds = 10;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int r = 0; r < kRounds; ++r) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }
};

// One logical stream of random numbers.  Cheap to construct and copy; all
// state is the (seed, stream, position) triple.
class RandomStream {
  public:
    RandomStream() : RandomStream(0, 0) {}
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint32_t next_u32() {
        if (word_ == 4) {
            buf_ = Philox4x32::block(
                {static_cast<std::uint32_t>(block_),
                 static_cast<std::uint32_t>(block_ >> 32),
                 static_cast<std::uint32_t>(stream_),
                 static_cast<std::uint32_t>(stream_ >> 32)},
                {static_cast<std::uint32_t>(seed_),
                 static_cast<std::uint32_t>(seed_ >> 32)});
            ++block_;
            word_ = 0;
        }
        return buf_[word_++];
    }

    // Uniform on (0, 1]: never returns 0, so log(u) is always finite.
    double next_u01() {
        return (static_cast<double>(next_u32()) + 1.0) * 0x1p-32;
    }

    // Standard normal via Box-Muller; draws two uniforms per pair and caches
    // the second variate.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_u01();
        const double u2 = next_u01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int word_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

namespace detail {
// splitmix64 finaliser; mixes derivation salts into stream bases.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}
}  // namespace detail

// A family of streams rooted at a master seed.  stream(i) yields the i-th
// member; derive(salt) yields a disjoint family for an independent purpose.
// Both are pure functions of (seed, base), so any estimator that assigns
// stream(i) to sample i gets results independent of thread count.
struct StreamFamily {
    std::uint64_t seed = 0;
    std::uint64_t base = 0;

    explicit StreamFamily(std::uint64_t master_seed, std::uint64_t base_id = 0)
        : seed(master_seed), base(base_id) {}

    RandomStream stream(std::uint64_t i) const {
        return RandomStream(seed, base + i);
    }

    StreamFamily derive(std::uint64_t salt) const {
        return StreamFamily(seed, detail::mix64(base ^ detail::mix64(salt)));
    }
};

}  // namespace contpol
