#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace spectralfdr {

// Philox4x64-10 counter-based generator (Salmon et al., SC'11).
//
// The key is (seed, stream); the 256-bit counter advances per block, so any
// (seed, stream) pair is an independent sequence that can be regenerated
// without touching a shared state. Output matches numpy.random.Philox for
// key = {seed, stream} when stream fits numpy's 128-bit key layout.
class PhiloxRng {
public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{seed, stream}, counter_{0, 0, 0, 0} {}

    // Independent substream: same key, counter word 3 set to `tag`.
    PhiloxRng substream(std::uint64_t tag) const {
        PhiloxRng r(key_[0], key_[1]);
        r.counter_[3] = tag;
        return r;
    }

    std::uint64_t next_u64();

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double gaussian();
    void fill_gaussian(std::span<double> out, double stddev = 1.0);

private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 4> block_{};
    int block_pos_ = 4;   // exhausted
    bool have_cached_gaussian_ = false;
    double cached_gaussian_ = 0.0;

    void generate_block();
};

}  // namespace spectralfdr
