#include "lepage/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace lepage {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
}  // namespace

ScalarLaw::ScalarLaw(Kind k) : kind_(std::move(k)) {
    if (auto* d = std::get_if<Discrete>(&kind_)) {
        cumulative_.resize(d->probs.size());
        std::partial_sum(d->probs.begin(), d->probs.end(), cumulative_.begin());
        const double total = cumulative_.back();
        for (auto& c : cumulative_) c /= total;
        cumulative_.back() = 1.0;
    }
}

ScalarLaw ScalarLaw::constant(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("constant law: value must be finite");
    return ScalarLaw(Constant{value});
}

ScalarLaw ScalarLaw::rademacher(double magnitude) {
    if (!(magnitude > 0.0) || !std::isfinite(magnitude)) {
        throw std::invalid_argument("rademacher law: magnitude must be positive");
    }
    return ScalarLaw(Rademacher{magnitude});
}

ScalarLaw ScalarLaw::uniform(double low, double high) {
    if (!(low < high) || !std::isfinite(low) || !std::isfinite(high)) {
        throw std::invalid_argument("uniform law: need finite low < high");
    }
    return ScalarLaw(Uniform{low, high});
}

ScalarLaw ScalarLaw::discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size()) {
        throw std::invalid_argument("discrete law: values and probs must be nonempty and aligned");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw std::invalid_argument("discrete law: negative probability");
        total += p;
    }
    if (!(total > 0.0)) throw std::invalid_argument("discrete law: probabilities sum to zero");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("discrete law: values must be finite");
    }
    return ScalarLaw(Discrete{std::move(values), std::move(probs)});
}

ScalarLaw ScalarLaw::normal(double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("normal law: sd must be positive");
    return ScalarLaw(Normal{mean, sd});
}

ScalarLaw ScalarLaw::exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential law: rate must be positive");
    return ScalarLaw(Exponential{rate});
}

double ScalarLaw::sample(RandomStream& stream) const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [&](const Rademacher& r) {
                return (stream.next_u64() >> 63) ? r.magnitude : -r.magnitude;
            },
            [&](const Uniform& u) { return u.low + (u.high - u.low) * stream.uniform(); },
            [&](const Discrete& d) {
                const double u = stream.uniform();
                const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
                const auto i = std::min<std::size_t>(it - cumulative_.begin(), d.values.size() - 1);
                return d.values[i];
            },
            [&](const Normal& n) { return n.mean + n.sd * stream.normal(); },
            [&](const Exponential& e) { return stream.exponential() / e.rate; },
        },
        kind_);
}

double ScalarLaw::lower() const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [](const Rademacher& r) { return -r.magnitude; },
            [](const Uniform& u) { return u.low; },
            [](const Discrete& d) {
                double lo = inf;
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    if (d.probs[i] > 0.0) lo = std::min(lo, d.values[i]);
                }
                return lo;
            },
            [](const Normal&) { return -inf; },
            [](const Exponential&) { return 0.0; },
        },
        kind_);
}

double ScalarLaw::upper() const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [](const Rademacher& r) { return r.magnitude; },
            [](const Uniform& u) { return u.high; },
            [](const Discrete& d) {
                double hi = -inf;
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    if (d.probs[i] > 0.0) hi = std::max(hi, d.values[i]);
                }
                return hi;
            },
            [](const Normal&) { return inf; },
            [](const Exponential&) { return inf; },
        },
        kind_);
}

double ScalarLaw::max_abs() const { return std::max(std::fabs(lower()), std::fabs(upper())); }

double ScalarLaw::mean() const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value; },
            [](const Rademacher&) { return 0.0; },
            [](const Uniform& u) { return 0.5 * (u.low + u.high); },
            [&](const Discrete& d) {
                double m = 0.0, total = 0.0;
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    m += d.values[i] * d.probs[i];
                    total += d.probs[i];
                }
                return m / total;
            },
            [](const Normal& n) { return n.mean; },
            [](const Exponential& e) { return 1.0 / e.rate; },
        },
        kind_);
}

bool ScalarLaw::deterministic() const {
    if (std::holds_alternative<Constant>(kind_)) return true;
    if (std::holds_alternative<Discrete>(kind_)) return lower() == upper();
    return false;
}

bool ScalarLaw::symmetric() const {
    return std::visit(
        overloaded{
            [](const Constant& c) { return c.value == 0.0; },
            [](const Rademacher&) { return true; },
            [](const Uniform& u) { return u.low == -u.high; },
            [&](const Discrete& d) {
                // every atom must be matched by its mirror image with equal mass
                for (std::size_t i = 0; i < d.values.size(); ++i) {
                    double mirror = 0.0;
                    for (std::size_t j = 0; j < d.values.size(); ++j) {
                        if (d.values[j] == -d.values[i]) mirror += d.probs[j];
                    }
                    double own = 0.0;
                    for (std::size_t j = 0; j < d.values.size(); ++j) {
                        if (d.values[j] == d.values[i]) own += d.probs[j];
                    }
                    if (std::fabs(mirror - own) > 1e-12 * (own + mirror)) return false;
                }
                return true;
            },
            [](const Normal& n) { return n.mean == 0.0; },
            [](const Exponential&) { return false; },
        },
        kind_);
}

std::size_t JumpLawPair::pick(double u) const {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(it - cumulative.begin(), shells.size() - 1);
}

double JumpLawPair::min_weight() const {
    double w = inf;
    for (const auto& s : shells) w = std::min(w, s.weight);
    return w;
}

double JumpLawPair::total_probability() const {
    double p = 0.0;
    for (const auto& s : shells) p += s.weight * s.mass;
    return p;
}

}  // namespace lepage
