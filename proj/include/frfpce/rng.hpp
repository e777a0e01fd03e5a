#ifndef FRFPCE_RNG_HPP
#define FRFPCE_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace frfpce::rng {

/// Derives an independent sub-seed from a master seed and a purpose label
/// (splitmix64 over the label bytes). Identical (seed, purpose) pairs always
/// give the same stream, so every consumer of randomness is reproducible in
/// isolation.
std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose);

/// Deterministic random stream. Uniform doubles are produced directly from
/// the top 53 bits of the generator output, so sequences do not depend on
/// standard-library distribution internals.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : gen_(seed) {}

    /// Uniform on [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 gen_;
};

/// Standard normal quantile function (inverse CDF), accurate to ~1e-15.
double normal_quantile(double p);

/// In-place Fisher-Yates shuffle driven by Stream::below.
void shuffle(std::vector<int>& v, Stream& stream);

}  // namespace frfpce::rng

#endif
