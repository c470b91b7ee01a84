#pragma once

#include <cstdint>
#include <random>

namespace relmeas {

/// One derived stream of a seedable generator family. A (seed, stream_id)
/// pair fully determines the sequence, so per-event streams replay
/// bit-exactly and are independent of each other.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to derive per-stream engine seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace relmeas
