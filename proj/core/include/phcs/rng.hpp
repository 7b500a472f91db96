#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace phcs {

/// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream.
///
/// A stream is identified by (seed, trial, lane). The seed is the key; trial
/// and lane occupy the upper counter words, and the lower words count blocks.
/// Two streams with different identifiers never share a counter, so per-trial
/// substreams are independent and replayable regardless of scheduling.
class Rng {
public:
    using result_type = std::uint32_t;

    Rng(std::uint64_t seed, std::uint64_t trial, std::uint32_t lane = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept;

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (one output per pair of uniforms, no
    /// cached state, so the stream position is a pure function of call count).
    double normal() noexcept;

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t trial() const noexcept { return trial_; }
    std::uint32_t lane() const noexcept { return lane_; }

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t trial_;
    std::uint32_t lane_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    unsigned used_ = 4;
};

/// Lanes reserved for the independent random needs of one trial.
namespace lanes {
inline constexpr std::uint32_t data = 0;
inline constexpr std::uint32_t tiebreak = 1;
inline constexpr std::uint32_t weights = 2;
} // namespace lanes

} // namespace phcs
