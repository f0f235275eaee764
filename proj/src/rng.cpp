#include "spectralfdr/rng.hpp"

#include <cmath>

namespace spectralfdr {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
    const unsigned __int128 p =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

void PhiloxRng::generate_block() {
    // Pre-increment of the 256-bit little-endian counter, as numpy does, so
    // output streams agree with numpy.random.Philox block for block.
    for (int i = 0; i < 4; ++i) {
        if (++counter_[i] != 0) break;
    }
    std::array<std::uint64_t, 4> ctr = counter_;
    std::array<std::uint64_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMult0, ctr[0], hi0, lo0);
        mulhilo(kMult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    block_ = ctr;
    block_pos_ = 0;
}

std::uint64_t PhiloxRng::next_u64() {
    if (block_pos_ >= 4) generate_block();
    return block_[block_pos_++];
}

double PhiloxRng::gaussian() {
    if (have_cached_gaussian_) {
        have_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_gaussian_ = radius * std::sin(angle);
    have_cached_gaussian_ = true;
    return radius * std::cos(angle);
}

void PhiloxRng::fill_gaussian(std::span<double> out, double stddev) {
    for (double& v : out) v = stddev * gaussian();
}

}  // namespace spectralfdr
