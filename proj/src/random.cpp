#include "lepage/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lepage {

namespace {

constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), key_(mix64(seed + golden)) {
    reset_state();
}

RandomStream RandomStream::child(std::uint64_t index) const {
    if (depth_ >= max_depth) {
        throw std::length_error("RandomStream: lineage deeper than max_depth");
    }
    RandomStream c(*this);
    c.lineage_[depth_] = index;
    c.depth_ = depth_ + 1;
    c.key_ = mix64(key_ ^ mix64(index + golden * (depth_ + 1)));
    c.has_spare_ = false;
    c.reset_state();
    return c;
}

void RandomStream::reset_state() {
    std::uint64_t sm = key_;
    for (auto& s : state_) {
        sm += golden;
        s = mix64(sm);
    }
}

std::uint64_t RandomStream::next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        // boost to shape + 1 and correct with U^(1/shape)
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RandomStream::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        // sequential inversion
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
            if (p == 0.0 && cdf < u) break;
        }
        return k;
    }
    // Hörmann's PTRS transformed rejection
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

std::uint64_t RandomStream::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below: n must be positive");
    // Lemire's multiply-shift with rejection
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t x = next_u64();
        const unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        if (static_cast<std::uint64_t>(m) >= threshold) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

void ArrivalStream::push_next() {
    const double prev = gammas_.empty() ? 0.0 : gammas_.back();
    double next = prev + stream_.exponential();
    if (next <= prev) next = std::nextafter(prev, std::numeric_limits<double>::infinity());
    gammas_.push_back(next);
}

void ArrivalStream::extend_to(std::size_t count) {
    while (gammas_.size() < count) push_next();
}

void ArrivalStream::extend_past(double bound) {
    while (gammas_.empty() || gammas_.back() <= bound) push_next();
}

ArrivalStream poisson_arrivals(const RandomStream& stream, std::size_t count) {
    ArrivalStream arrivals(stream);
    arrivals.extend_to(count);
    return arrivals;
}

double stable_positive(double alpha, RandomStream& stream) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("stable_positive: alpha must lie in (0,1)");
    }
    const double u = std::numbers::pi * stream.uniform();
    const double w = stream.exponential();
    const double lead = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double tail = std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return lead * tail;
}

double stable_symmetric(double alpha, double scale, RandomStream& stream) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
        throw std::invalid_argument("stable_symmetric: alpha must lie in (0,2]");
    }
    if (!(scale > 0.0)) throw std::invalid_argument("stable_symmetric: scale must be positive");
    const double u = std::numbers::pi * (stream.uniform() - 0.5);
    if (alpha == 1.0) return scale * std::tan(u);
    const double w = stream.exponential();
    // Symmetric CMS has no skewness term, so the formula stays well conditioned
    // as alpha approaches 1.
    const double x = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha) *
                     std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return std::pow(scale, 1.0 / alpha) * x;
}

}  // namespace lepage
