#include "fdrecon/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace fdrecon {

namespace {

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* hi) {
    __uint128_t p = static_cast<__uint128_t>(a) * b;
    *hi = static_cast<std::uint64_t>(p >> 64);
    return static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> CounterRng::block(const std::array<std::uint64_t, 2>& key,
                                               const std::array<std::uint64_t, 4>& counter) {
    std::uint64_t k0 = key[0], k1 = key[1];
    std::uint64_t x0 = counter[0], x1 = counter[1], x2 = counter[2], x3 = counter[3];
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, hi1;
        const std::uint64_t lo0 = mulhilo(kMult0, x0, &hi0);
        const std::uint64_t lo1 = mulhilo(kMult1, x2, &hi1);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {x0, x1, x2, x3};
}

void CounterRng::refill() {
    buffer_ = block(key_, counter_);
    pos_ = 0;
    // 256-bit counter increment
    if (++counter_[0] == 0)
        if (++counter_[1] == 0)
            if (++counter_[2] == 0) ++counter_[3];
}

std::uint64_t CounterRng::next_u64() {
    if (pos_ >= 4) refill();
    return buffer_[pos_++];
}

double CounterRng::next_unit() {
    // 53 high bits, shifted into (0, 1]
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be >= 1");
    const std::uint64_t reject_below = (-n) % n;  // 2^64 mod n
    std::uint64_t r;
    do {
        r = next_u64();
    } while (r < reject_below);
    return r % n;
}

}  // namespace fdrecon
