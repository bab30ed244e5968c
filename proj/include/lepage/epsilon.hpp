#pragma once

#include "lepage/laws.hpp"
#include "lepage/random.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lepage {

enum class PathKind { piecewise_constant, continuous };

struct Jump {
    double time;
    double height;
    friend bool operator==(const Jump&, const Jump&) = default;
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Spectral process families.
//
// Every family exposes the same small protocol, used both by PathFn and by the
// series engines:
//   Draw draw(RandomStream&, double s_max) const
//       one realization; s_max bounds the largest argument the caller will
//       query, which lets jump families skip drawing marks of terms that stay
//       zero on [0, s_max].
//   void eval(Draw&, span base, double divisor, span out) const
//       out[j] = ε(base[j] / divisor).
//   void jumps(const Draw&, double horizon, vector<Jump>&) const
//       piecewise-constant families only; jumps with time <= horizon.
//   double activation(double level) const
//       a time s* with |ε(s)| <= level for all s < s* almost surely (0 if unknown).
// ---------------------------------------------------------------------------

/// ε(t) = η·1{tζ >= 1}.
struct SingleJump {
    static constexpr PathKind kind = PathKind::piecewise_constant;
    struct Draw {
        double time = infinity;  // 1/ζ
        double height = 0.0;
    };
    JumpLaw law;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw& d, double horizon, std::vector<Jump>& out) const;
    double activation(double level) const;
    bool symmetric() const;
    bool deterministic() const;
};

/// ε(t) = η·1{t >= η}, η > 0.
struct JumpAtEta {
    static constexpr PathKind kind = PathKind::piecewise_constant;
    struct Draw {
        double height = 0.0;
    };
    ScalarLaw eta;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw& d, double horizon, std::vector<Jump>& out) const;
    double activation(double level) const;
    bool symmetric() const { return false; }
    bool deterministic() const { return eta.deterministic(); }
};

/// ε(t) = η·t^{1/α}, α in (0,2).
struct PowerScaled {
    static constexpr PathKind kind = PathKind::continuous;
    struct Draw {
        double eta = 0.0;
    };
    double alpha;
    ScalarLaw eta;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw&, double, std::vector<Jump>&) const {}
    double activation(double level) const;
    bool symmetric() const { return eta.symmetric(); }
    bool deterministic() const { return eta.deterministic(); }
};

/// Fractional Brownian motion with Hurst index H in (1/2, 1), realized on the
/// queried times by Cholesky factorization of the covariance.
struct FbmSpectral {
    static constexpr PathKind kind = PathKind::continuous;
    struct Realization;
    struct Draw {
        RandomStream stream;
        std::shared_ptr<Realization> realized;
    };
    double hurst;
    std::shared_ptr<struct CholeskyCache> cache;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw&, double, std::vector<Jump>&) const {}
    double activation(double) const { return 0.0; }
    bool symmetric() const { return true; }
    bool deterministic() const { return false; }
};

enum class PowerVariant {
    power_minus_one,  // (t^β - 1)_+
    shifted_power,    // (t - 1)_+^β
};

struct DeterministicPower {
    static constexpr PathKind kind = PathKind::continuous;
    struct Draw {};
    double beta;
    PowerVariant variant;

    Draw draw(RandomStream&, double) const { return {}; }
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw&, double, std::vector<Jump>&) const {}
    double activation(double) const { return 1.0; }
    bool symmetric() const { return false; }
    bool deterministic() const { return true; }
};

/// ε(t) = ⌊t⌋.
struct IntegerPart {
    static constexpr PathKind kind = PathKind::piecewise_constant;
    /// Jump lists are cut after this many jumps when the horizon is unbounded.
    static constexpr std::size_t max_jumps = std::size_t{1} << 20;
    struct Draw {};

    Draw draw(RandomStream&, double) const { return {}; }
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw& d, double horizon, std::vector<Jump>& out) const;
    double activation(double) const { return 1.0; }
    bool symmetric() const { return false; }
    bool deterministic() const { return true; }
};

/// Random step function drawn from a finite mixture of finite jump lists.
struct CustomStep {
    static constexpr PathKind kind = PathKind::piecewise_constant;
    struct Draw {
        std::size_t index = 0;
        bool active = false;
    };
    std::vector<std::vector<Jump>> paths;
    std::vector<double> weights;
    std::vector<double> cumulative;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw& d, double horizon, std::vector<Jump>& out) const;
    double activation(double level) const;
    bool symmetric() const { return false; }
    bool deterministic() const { return paths.size() == 1; }
};

/// Samples an inner process at arbitrary nonnegative times (one joint draw per call).
using InnerSampler =
    std::function<std::vector<double>(std::span<const double> times, RandomStream& stream)>;

/// ε(t) = ξ(t^{1/α}) for an inner time-stable process ξ with E|ξ(1)| < ∞.
///
/// A realization is fixed by its first batch query; querying the same draw at a
/// different set of times is a logic error.
struct Composed {
    static constexpr PathKind kind = PathKind::continuous;
    struct Draw {
        RandomStream stream;
        std::vector<double> times;
        std::vector<double> values;
        bool realized = false;
    };
    InnerSampler inner;
    std::string inner_label;
    double alpha;
    bool finite_mean;  // caller-supplied certificate for E|ξ(1)| < ∞
    bool inner_symmetric = false;

    Draw draw(RandomStream& stream, double s_max) const;
    void eval(Draw& d, std::span<const double> base, double divisor, std::span<double> out) const;
    void jumps(const Draw&, double, std::vector<Jump>&) const {}
    double activation(double) const { return 0.0; }
    bool symmetric() const { return inner_symmetric; }
    bool deterministic() const { return false; }
};

using Family = std::variant<SingleJump, JumpAtEta, PowerScaled, FbmSpectral, DeterministicPower,
                            IntegerPart, CustomStep, Composed>;

/// Immutable, cheaply copyable description of the law of ε.
class EpsilonSpec {
public:
    static EpsilonSpec single_jump(ScalarLaw height, ScalarLaw inverse_time);
    static EpsilonSpec single_jump(JumpLawPair pair);
    static EpsilonSpec jump_at_eta(ScalarLaw eta);
    static EpsilonSpec power_scaled(double alpha, ScalarLaw eta);
    static EpsilonSpec fbm(double hurst);
    static EpsilonSpec deterministic_power(double beta, PowerVariant variant);
    static EpsilonSpec integer_part();
    static EpsilonSpec custom_step(std::vector<std::vector<Jump>> paths, std::vector<double> weights);
    static EpsilonSpec composed(InnerSampler inner, std::string inner_label, double alpha,
                                bool finite_mean, bool inner_symmetric = false);

    const Family& family() const { return *family_; }
    std::shared_ptr<const Family> family_ptr() const { return family_; }
    std::string name() const;
    PathKind kind() const;
    double activation(double level = 0.0) const;
    bool symmetric() const;
    bool deterministic() const;
    /// Analytic guarantee of E∫min(1,|ε(t)|)t⁻²dt < ∞.
    bool abs_certified() const;
    /// Analytic guarantee of E∫min(1,ε(t)²)t⁻²dt < ∞.
    bool square_certified() const;
    /// Paths are nonnegative and nondecreasing.
    bool monotone_nonnegative() const;

private:
    explicit EpsilonSpec(Family f) : family_(std::make_shared<const Family>(std::move(f))) {}
    std::shared_ptr<const Family> family_;
};

/// One realized path of ε.
class PathFn {
public:
    struct Impl;

    double value(double t);
    std::vector<double> values(std::span<const double> times);
    PathKind kind() const;
    /// Sorted jumps with time <= horizon (piecewise-constant paths only).
    std::vector<Jump> jump_record(double horizon = infinity) const;

    explicit PathFn(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}

private:
    std::shared_ptr<Impl> impl_;
};

PathFn sample_path(const EpsilonSpec& spec, RandomStream stream);

/// Fractional Brownian motion with Hurst index in (0, 1) at the given times
/// (any order, duplicates and zeros allowed).
std::vector<double> fbm_sample(double hurst, std::span<const double> times, RandomStream& stream);

// ---------------------------------------------------------------------------
// Path-functional integrals ∫₀^∞ g(ε(s)) s⁻² ds.
// ---------------------------------------------------------------------------

struct QuadratureBudget {
    std::size_t draws = 10000;
    std::size_t nodes = 256;
    /// Node range in log-time for continuous paths; default covers [2⁻⁶⁰, 2⁶⁰].
    double log_lo = -41.58883083359672;
    double log_hi = 41.58883083359672;
    std::uint64_t seed = 0x51A7E5;
};

/// One draw of ε discretized for integration against s⁻² ds.
///
/// Piecewise-constant paths become exact constant pieces [lo, hi); continuous
/// paths become jittered log-spaced nodes (lo == hi == node). The weight of a
/// piece restricted to [a, b] is returned by `weight_within`.
struct PathPieces {
    struct Piece {
        double lo, hi, value;
        bool node;
        double weight;  // full weight of the piece
    };
    std::vector<Piece> pieces;

    static double weight_within(const Piece& p, double a, double b);

    template <class G> double integrate(G&& g) const {
        double acc = 0.0;
        for (const auto& p : pieces) acc += g(p.value) * p.weight;
        return acc;
    }
};

/// Discretizes `budget.draws` independent draws; draw i uses stream
/// RandomStream(budget.seed).child(i). Deterministic families use a single draw.
std::vector<PathPieces> discretize_draws(const EpsilonSpec& spec, const QuadratureBudget& budget);

enum class IntegrabilityMode { abs, square };

struct IntegrabilityVerdict {
    enum class Outcome { finite, suspected_divergent };
    IntegrabilityMode mode;
    double estimate;           // ∫ over the widest horizon
    double unit_interval;      // contribution of (0, 1]
    double tail;               // contribution of (1, ∞)
    Outcome verdict;
    QuadratureBudget budget;
    std::size_t draws_used;
    /// Estimates over [2^-j, 2^j], j = 1, 2, ...
    std::vector<double> horizon_trace;
    std::size_t converged_at = 0;  // j at which the doubling rule fired (0: never)
};

/// Monte Carlo estimate of E∫₀^∞ min(1, |ε(t)| or ε(t)²) t⁻² dt with a doubling
/// diagnostic: `finite` when doubling the horizon moves the estimate by less
/// than 0.5% twice in a row.
IntegrabilityVerdict check_integrability(const EpsilonSpec& spec, IntegrabilityMode mode,
                                         const QuadratureBudget& budget = {});

std::string to_string(IntegrabilityVerdict::Outcome o);

}  // namespace lepage
