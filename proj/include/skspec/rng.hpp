#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace skspec {

/// Philox4x32-10 counter-based generator (Salmon et al. constants).
/// Stateless: any (key, counter) block is reproducible independent of
/// iteration order, which is what makes noise coupling across eps and
/// across cutoffs trivial.
struct Philox4x32 {
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                              std::array<std::uint32_t, 4> ctr) {
        std::uint32_t k0 = std::uint32_t(key), k1 = std::uint32_t(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ k0, std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ k1, std::uint32_t(p0)};
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }
};

namespace detail {
/// 64 random bits -> uniform in (0,1); offset keeps it away from 0 for logs.
inline double bits_to_uniform(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t b = (std::uint64_t(hi) << 32) | lo;
    return double(b >> 11) * 0x1.0p-53 + 0x1.0p-54;
}
}  // namespace detail

/// Two standard normals from one Philox block via Box-Muller.
inline std::array<double, 2> normal_pair(std::uint64_t key, std::array<std::uint32_t, 4> ctr) {
    const auto b = Philox4x32::block(key, ctr);
    const double u1 = detail::bits_to_uniform(b[0], b[1]);
    const double u2 = detail::bits_to_uniform(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

/// Standard-normal quadruple keyed by (seed, mode, step). Streams 0 and 1
/// are reserved: the noise path consumes them; other stream ids are free
/// for auxiliary sampling.
inline std::array<double, 4> normal_quad(std::uint64_t seed, int n1, int n2, std::uint32_t step,
                                         std::uint32_t stream_base = 0) {
    const std::array<std::uint32_t, 4> c0{std::uint32_t(n1), std::uint32_t(n2), step,
                                          stream_base};
    const std::array<std::uint32_t, 4> c1{std::uint32_t(n1), std::uint32_t(n2), step,
                                          stream_base + 1};
    const auto a = normal_pair(seed, c0);
    const auto b = normal_pair(seed, c1);
    return {a[0], a[1], b[0], b[1]};
}

}  // namespace skspec
