#pragma once

#include "lepage/random.hpp"

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace lepage {

/// Distribution of a scalar parameter (jump height η, inverse jump-time ζ, ...).
class ScalarLaw {
public:
    struct Constant { double value; };
    /// ±magnitude with probability 1/2 each.
    struct Rademacher { double magnitude; };
    struct Uniform { double low, high; };
    struct Discrete { std::vector<double> values, probs; };
    struct Normal { double mean, sd; };
    struct Exponential { double rate; };
    using Kind = std::variant<Constant, Rademacher, Uniform, Discrete, Normal, Exponential>;

    ScalarLaw() : ScalarLaw(Constant{1.0}) {}

    static ScalarLaw constant(double value);
    static ScalarLaw rademacher(double magnitude = 1.0);
    static ScalarLaw uniform(double low, double high);
    static ScalarLaw discrete(std::vector<double> values, std::vector<double> probs);
    static ScalarLaw normal(double mean, double sd);
    static ScalarLaw exponential(double rate);

    double sample(RandomStream& stream) const;

    /// Support bounds; may be infinite.
    double lower() const;
    double upper() const;
    double max_abs() const;
    double mean() const;
    bool deterministic() const;
    bool symmetric() const;

    const Kind& kind() const { return kind_; }

private:
    explicit ScalarLaw(Kind k);
    Kind kind_;
    std::vector<double> cumulative_;  // Discrete only
};

/// η and ζ drawn independently.
struct IndependentJumpLaw {
    ScalarLaw height;
    ScalarLaw inverse_time;  // ζ > 0
};

/// Joint (η, ζ) law assembled from a shell decomposition of a Lévy measure:
/// P{η ∈ A, ζ = 1/c_k} = Λ(A ∩ B_k) c_k.
struct JumpLawPair {
    struct Shell {
        int index;          // k
        double mass;        // q_k = Λ(B_k)
        double weight;      // c_k
        std::function<double(RandomStream&)> sample;  // law Λ(· ∩ B_k) / q_k
    };
    std::vector<Shell> shells;
    std::vector<double> cumulative;  // cumulative c_k q_k, last entry 1
    std::string source;              // serialized description of the measure
    bool nonnegative_marks = false;  // every shell lies in (0, ∞)

    /// Shell index chosen by a uniform draw.
    std::size_t pick(double u) const;
    double min_weight() const;
    double total_probability() const;
};

using JumpLaw = std::variant<IndependentJumpLaw, JumpLawPair>;

}  // namespace lepage
