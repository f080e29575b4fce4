#pragma once

#include <array>
#include <cstdint>

namespace fdrecon {

/// Philox4x64-10 counter-based generator.
///
/// A (seed, stream) pair is the 128-bit key and selects an independent
/// substream; the 256-bit counter advances one block per 4 drawn words.
/// Parallel code derives one stream per work item, which makes every draw
/// independent of scheduling and worker count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{seed, stream} {}

    /// Raw Philox4x64-10 block at an explicit key/counter.
    static std::array<std::uint64_t, 4> block(const std::array<std::uint64_t, 2>& key,
                                              const std::array<std::uint64_t, 4>& counter);

    std::uint64_t next_u64();

    /// Uniform on (0, 1] with 53-bit resolution. Never returns 0, so it is
    /// safe under log().
    double next_unit();

    /// Standard normal via Box-Muller; draws two uniforms per pair.
    double next_gaussian();

    /// Uniform on {0, ..., n-1}, unbiased (rejection). n must be >= 1.
    std::uint64_t next_below(std::uint64_t n);

private:
    void refill();

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
    std::array<std::uint64_t, 4> buffer_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fdrecon
