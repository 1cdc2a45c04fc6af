#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace grrm::harness {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded stream with portable draws: the standard distributions are
/// implementation-defined, so uniform reals, bounded integers and shuffles
/// are written out here on top of mt19937_64.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform on {0, …, n−1} by rejection.
    std::uint64_t below(std::uint64_t n);
    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// 0, 1, …, n−1 in random order.
std::vector<std::size_t> permutation(std::size_t n, Rng& rng);

}  // namespace grrm::harness
