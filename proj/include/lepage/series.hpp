#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/random.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lepage {

/// L(u) = u on [-1, 1], clipped to ±1 outside.
double levy_function(double u);

enum class SeriesMode { plain, compensated, symmetric };

struct Truncation {
    enum class Kind { fixed, adaptive };
    Kind kind = Kind::adaptive;
    std::size_t terms = 1000;        // fixed N
    double tolerance = 1e-4;         // adaptive: relative change per doubling
    std::size_t initial_terms = 64;  // adaptive: first N
    std::size_t max_terms = std::size_t{1} << 22;
};

/// Default r-sequence 2^-k, k = 0..12.
std::vector<double> default_r_sequence();

struct LePageConfig {
    double drift_c = 0.0;
    Truncation truncation;
    std::vector<double> r_sequence = default_r_sequence();
    std::size_t compensator_budget = 10000;  // ε draws
    std::size_t compensator_nodes = 256;     // log-time nodes for continuous ε
    std::uint64_t compensator_seed = 0xC0517A7;
    double r_tolerance = 1e-3;
    /// Throw ConvergenceError when the r-sequence does not stabilize.
    bool strict_convergence = false;
    /// Refuse specs without the analytic integrability certificate of the mode.
    bool require_certificate = true;
    SeriesMode mode = SeriesMode::plain;

    void validate() const;
};

struct SampleMeta {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> lineage;
    std::size_t terms_used = 0;
    bool exact_truncation = false;
    bool converged = true;
    std::size_t converged_at = 0;  // index into r_sequence where the r-rule fired
    std::vector<double> compensator;             // t-independent factor K(r) per r
    std::vector<std::vector<double>> r_trace;    // path values per r
};

/// One path on a time grid. The grid is sorted, duplicate-free and starts at 0.
struct PathSample {
    std::vector<double> grid;
    std::vector<double> values;
    std::optional<std::vector<Jump>> jumps;  // piecewise-constant paths only
    SampleMeta meta;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sorted, duplicate-free copy of the grid with 0 prepended when missing.
std::vector<double> normalize_grid(std::span<const double> grid);

/// ξ(t) = c·t + Σ ε_i(t/Γ_i). Stream layout: arrivals from child(0), term i
/// from child(1).child(i).
PathSample simulate_plain(const EpsilonSpec& spec, std::span<const double> grid,
                          const LePageConfig& cfg, const RandomStream& stream);

/// t-independent compensator factors K(r) = E∫₀^∞ L(ε(v))·1{|ε(v)|>r} v⁻² dv.
struct CompensatorTable {
    std::vector<double> r;
    std::vector<double> factor;
    std::size_t draws = 0;
};

CompensatorTable compensator_table(const EpsilonSpec& spec, std::span<const double> r_sequence,
                                   const QuadratureBudget& budget);
CompensatorTable compensator_table(const EpsilonSpec& spec, const LePageConfig& cfg);

/// Compensated (or, for symmetric ε, uncompensated truncated) series along the
/// r-sequence; returns the values at the final r with the per-r trace in meta.
/// Computes the compensator table when none is supplied.
PathSample simulate_compensated(const EpsilonSpec& spec, std::span<const double> grid,
                                const LePageConfig& cfg, const RandomStream& stream,
                                const CompensatorTable* table = nullptr);

/// Dispatches on cfg.mode.
PathSample simulate(const EpsilonSpec& spec, std::span<const double> grid, const LePageConfig& cfg,
                    const RandomStream& stream, const CompensatorTable* table = nullptr);

struct CumulantQuery {
    double lambda = 1.0;
    double t = 1.0;
    double drift_c = 0.0;
    QuadratureBudget quad_budget;
};

/// Ψ(λ) = -iλc + ∫₀^∞ E(1 - e^{iλε(s)}) s⁻² ds.
std::complex<double> cumulant(const EpsilonSpec& spec, const CumulantQuery& q);
/// Ψ at several frequencies sharing one set of ε draws.
std::vector<std::complex<double>> cumulant_curve(const EpsilonSpec& spec,
                                                 std::span<const double> lambdas, double drift_c,
                                                 const QuadratureBudget& budget);
/// E exp(iλξ(t)) = exp(-tΨ(λ)).
std::complex<double> marginal_cf(const EpsilonSpec& spec, const CumulantQuery& q);

}  // namespace lepage
