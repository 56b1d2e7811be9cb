// rng.hpp
//
// Counter-based random streams for reproducible parallel Monte Carlo.
//
// Philox4x32-10 (Salmon et al., SC'11) keyed by the 64-bit master seed. The
// upper half of the 128-bit counter carries the stream index, the lower half
// the block index, so stream (seed, i) is a pure function of its two inputs
// and never depends on how trajectories are distributed over workers.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ricker {

class Philox4x32
{
  public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static counter_type block(counter_type ctr, key_type key) noexcept
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeylA;
                key[1] += kWeylB;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static counter_type single_round(const counter_type& ctr, const key_type& key) noexcept
    {
        const std::uint64_t p0 = std::uint64_t{kMulA} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMulB} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
};

/// One independent random stream, identified by (master_seed, stream_index).
///
/// Satisfies UniformRandomBitGenerator with 64-bit output. Owned by exactly
/// one trajectory worker; streams are never shared.
class RngStream
{
  public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
        : key_{static_cast<std::uint32_t>(master_seed),
               static_cast<std::uint32_t>(master_seed >> 32)},
          stream_{stream_index}
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        if (pos_ == 2) {
            refill();
        }
        return buffer_[pos_++];
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform_open() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t stream_index() const noexcept { return stream_; }
    std::uint64_t blocks_used() const noexcept { return block_; }

    /// Slot for the second variate of a paired normal draw.
    bool take_spare(double& out) noexcept
    {
        if (!has_spare_) {
            return false;
        }
        has_spare_ = false;
        out = spare_;
        return true;
    }
    void put_spare(double v) noexcept
    {
        spare_ = v;
        has_spare_ = true;
    }

  private:
    void refill() noexcept
    {
        const Philox4x32::counter_type ctr{static_cast<std::uint32_t>(block_),
                                           static_cast<std::uint32_t>(block_ >> 32),
                                           static_cast<std::uint32_t>(stream_),
                                           static_cast<std::uint32_t>(stream_ >> 32)};
        const auto out = Philox4x32::block(ctr, key_);
        buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++block_;
        pos_ = 0;
    }

    Philox4x32::key_type key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int pos_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ricker
