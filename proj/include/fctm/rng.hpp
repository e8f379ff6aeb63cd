#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fctm {

// Stream seed for (master, stream); the same pair always maps to the same
// value, independent of evaluation order, so per-document work can be
// sharded freely without changing results.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic generator. All distributions are implemented here rather
// than with std::*_distribution, whose output is implementation-defined;
// identical seeds must give identical streams on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; consecutive draws use the cached pair.
    double normal();

    // Uniform on {0, ..., n-1}, unbiased (multiply-shift with rejection).
    std::uint64_t below(std::uint64_t n);

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fctm
