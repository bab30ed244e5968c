#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lepage {

/// Reproducible random stream identified by (seed, lineage).
///
/// Streams are split hierarchically: `child(i)` derives an independent stream
/// from the parent's identity only, never from how many variates the parent
/// has produced. Two streams with equal (seed, lineage) produce bit-identical
/// sequences on every platform. The generator is xoshiro256** keyed through
/// the splitmix64 finalizer; all variates are built from raw 64-bit outputs.
///
/// A single stream must not be shared between threads; hand each worker its
/// own child instead.
class RandomStream {
public:
    static constexpr std::size_t max_depth = 16;

    explicit RandomStream(std::uint64_t seed = 0);

    RandomStream child(std::uint64_t index) const;

    std::uint64_t seed() const { return seed_; }
    std::span<const std::uint64_t> lineage() const { return {lineage_.data(), depth_}; }
    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Unit-mean exponential.
    double exponential();
    double normal();
    /// Gamma(shape, 1) via Marsaglia-Tsang.
    double gamma(double shape);
    std::uint64_t poisson(double mean);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    void reset_state();

    std::uint64_t seed_;
    std::uint64_t key_;
    std::array<std::uint64_t, max_depth> lineage_{};
    std::size_t depth_ = 0;
    std::array<std::uint64_t, 4> state_{};
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Successive points 0 < Γ₁ < Γ₂ < ... of a unit-rate Poisson process.
///
/// The sequence is extended lazily; already generated points never change.
class ArrivalStream {
public:
    explicit ArrivalStream(RandomStream stream) : stream_(stream) {}

    /// Makes sure at least `count` points exist.
    void extend_to(std::size_t count);
    /// Generates points until the last one exceeds `bound`.
    void extend_past(double bound);

    std::size_t size() const { return gammas_.size(); }
    double operator[](std::size_t i) const { return gammas_[i]; }
    std::span<const double> points() const { return gammas_; }
    const RandomStream& stream() const { return stream_; }

private:
    void push_next();

    RandomStream stream_;
    std::vector<double> gammas_;
};

/// First `count` Poisson arrivals of the stream (count = 0 gives an empty sequence).
ArrivalStream poisson_arrivals(const RandomStream& stream, std::size_t count);

/// Positive strictly alpha-stable variate with Laplace transform exp(-lambda^alpha),
/// alpha in (0,1). Kanter / Chambers-Mallows-Stuck representation.
double stable_positive(double alpha, RandomStream& stream);

/// Symmetric alpha-stable variate with characteristic function
/// exp(-scale * |lambda|^alpha), alpha in (0,2]. alpha = 1 is drawn as an
/// exact Cauchy variate; alpha = 2 is N(0, 2 * scale).
double stable_symmetric(double alpha, double scale, RandomStream& stream);

}  // namespace lepage
