#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace stepdiff {

// Counter-based random number generation (Philox 4x32-10).
//
// Every variate is a pure function of (key, counter), so path-level
// parallelism cannot change results: stream i of an experiment produces the
// same sequence no matter which worker runs it or in which order.

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// One Philox 4x32 block (10 rounds). Stateless.
std::array<std::uint32_t, 4> philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Role of a stream inside an experiment. Part of the stream identity, so
/// e.g. array sampling and limit-process sampling never share variates.
enum class StreamPurpose : std::uint32_t {
    Array = 1,      // triangular-array row sampling
    Limit = 2,      // limit-process (SDE) sampling
    Subsample = 3,  // statistics-internal subsampling
    Scratch = 4,    // tests and ad-hoc draws
};

/// Identity of one stream. The mapping (master, index, purpose) -> key is
/// injective by construction: master fills the Philox key, index and purpose
/// occupy dedicated counter words. Byte-exact across platforms and workers.
struct RngKey {
    std::uint64_t master = 0;
    std::uint32_t index = 0;
    std::uint32_t purpose = 0;

    bool operator==(const RngKey&) const = default;
};

RngKey seed_schedule(std::uint64_t master, std::uint32_t index, StreamPurpose purpose);

/// A deterministic stream of variates drawn from one RngKey.
///
/// Block layout: block b of stream (master, index, purpose) is
///   philox4x32({lo32(b), hi32(b), index, purpose}, {lo32(master), hi32(master)}).
/// Each block yields two 64-bit words, consumed in order. Normal variates are
/// produced in Box-Muller pairs; the second of a pair is cached.
class RngStream {
public:
    RngStream() : RngStream(RngKey{}) {}
    explicit RngStream(RngKey key);

    const RngKey& key() const { return key_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64();

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform01();

    /// Standard normal (Box-Muller).
    double normal();

    /// Rademacher sign, +1 or -1 each with probability 1/2.
    double sign();

private:
    void refill();

    RngKey key_;
    PhiloxKey philox_key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;  // consumed words in buf_; 4 == exhausted
    bool have_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace stepdiff
