#pragma once

#include <cstdint>
#include <limits>

namespace qfp {

// Counter-based 64-bit generator (splitmix64 finalizer over seed + counter).
// The n-th output is a pure function of (seed, n), so streams can be split
// and replayed without carrying generator state across threads.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() { return at(counter_++); }

    // Random access into the stream.
    result_type at(std::uint64_t counter) const;

    // Uniform double in (0,1); never returns an exact endpoint so it is safe
    // to feed through inverse CDFs.
    double next_double();

    // Standard normal draw via inverse-CDF transform.
    double next_normal();

    // Uniform double in [lo, hi).
    double next_uniform(double lo, double hi);

    // Bernoulli(p) draw.
    bool next_bernoulli(double p) { return next_double() < p; }

    // Derived independent stream; deterministic in (seed, stream_id).
    CounterRng split(std::uint64_t stream_id) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

// Stable 64-bit mix used for deriving cell seeds from coordinates.
std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v);

// Inverse of the standard normal CDF, accurate to full double precision
// (rational initial guess refined by one Halley step on erfc).
double inverse_normal_cdf(double p);

} // namespace qfp
