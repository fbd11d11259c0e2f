#ifndef GCNL_RANDOM_HPP
#define GCNL_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace gcnl {

// Seeded generator whose derived draws are identical on every platform.
// The standard distributions are implementation-defined, so uniform and
// normal variates are computed here from the raw 64-bit engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform in [0, 1) with 53 bits of resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n);

    // standard normal via Box-Muller; the second variate is cached
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Fisher-Yates permutation of [0, n)
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Mixes a base seed with a stream index so independent streams do not alias.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace gcnl

#endif // GCNL_RANDOM_HPP
