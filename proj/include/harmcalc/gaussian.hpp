#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace harmcalc {

/// Seedable standard-normal stream: mt19937_64 driving a Box-Muller transform.
/// The transform is spelled out here (rather than std::normal_distribution)
/// so a given seed produces the same stream on every platform.
class GaussianStream {
public:
    static constexpr const char* kGeneratorName = "mt19937_64+box-muller";

    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0,1], u2 in [0,1)
        const double u1 = 1.0 - to_unit(engine_());
        const double u2 = to_unit(engine_());
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Derives an independent stream for shard `index` of a run seeded `seed`.
    static GaussianStream for_shard(std::uint64_t seed, std::uint64_t index) {
        // splitmix64 step keeps shard seeds decorrelated.
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return GaussianStream(z ^ (z >> 31));
    }

private:
    static double to_unit(std::uint64_t x) {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace harmcalc
