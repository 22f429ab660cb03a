#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace emoscal {

/// Deterministic random stream. Wraps mt19937_64 but produces uniforms and
/// normals through fully specified arithmetic, so sequences are identical
/// across standard libraries for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw in the open interval (0,1).
    double uniform01()
    {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n)
    {
        // Rejection to keep the draw unbiased.
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % n;
    }

    /// Standard normal draw (Marsaglia polar method, cached spare).
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        has_spare_ = true;
        return u * factor;
    }

    /// Derives an independent substream seed, e.g. one per day or task.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream)
    {
        return mix(master ^ mix(stream + 0x9e3779b97f4a7c15ULL));
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace emoscal
