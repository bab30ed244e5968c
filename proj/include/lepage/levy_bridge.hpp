#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/series.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lepage {

/// Λ restricted to B_k, where B₀ = {|x| > 1} and B_k = {2^-k < |x| ≤ 2^-k+1}.
struct LevyShell {
    int k = 0;
    double mass = 0.0;                           // q_k = Λ(B_k)
    std::function<double(RandomStream&)> sample;  // law Λ(· ∩ B_k)/q_k
    double first_moment = 0.0;                   // ∫_{B_k} x Λ(dx)
    double abs_moment = 0.0;                     // ∫_{B_k} |x| Λ(dx)
    double square_moment = 0.0;                  // ∫_{B_k} min(1, x²) Λ(dx)
};

/// Lévy measure cut into dyadic shells; shells with zero mass are omitted and
/// the part below the finest shell is reported, not simulated.
struct DiscretizedLevyMeasure {
    std::vector<LevyShell> shells;  // ascending k
    std::string description;
    bool nonnegative = false;       // Λ lives on (0, ∞)
    double neglected_mass = 0.0;            // Λ of the dropped small jumps (may be infinite)
    double neglected_abs_moment = 0.0;      // ∫ |x| over the dropped small jumps
    double neglected_square_moment = 0.0;   // ∫ x² over the dropped small jumps

    void validate() const;
    double total_mass() const;
    /// Σ_k ∫_{B_k} x Λ(dx): the mean of ξ(1) for the simulated (truncated) measure.
    double first_moment() const;
    /// Σ_k ∫_{B_k} min(1, x²) Λ(dx).
    double square_moment() const;
};

/// Λ(dx) = a x⁻¹ e^{-bx} dx on (0, ∞), shells k = 0..k_max.
DiscretizedLevyMeasure gamma_levy_measure(double a, double b, int k_max = 12);
/// Λ(dx) = C |x|^{-1-α} dx, α in (0, 2), shells k = 0..k_max.
DiscretizedLevyMeasure symmetric_stable_levy_measure(double alpha, double c, int k_max = 12);
/// Finite measure Σ w_j δ_{x_j}.
DiscretizedLevyMeasure atomic_levy_measure(std::vector<double> atoms, std::vector<double> weights);
/// Shell index of a jump size: 0 for |x| > 1, else k with 2^-k < |x| ≤ 2^-k+1.
int shell_index(double x);

enum class ShellWeighting {
    geometric,     // c_k q_k ∝ 2^{-k-1}
    proportional,  // c_k q_k ∝ q_k, i.e. one common jump-time scale
};

/// Shell probabilities w_k = c_k q_k for the chosen weighting.
std::vector<double> shell_probabilities(const DiscretizedLevyMeasure& m, ShellWeighting w);

/// SingleJump ε(t) = η·1{tζ ≥ 1} with P{η ∈ A, ζ = 1/c_k} = Λ(A ∩ B_k)·c_k.
EpsilonSpec levy_measure_to_epsilon(const DiscretizedLevyMeasure& m,
                                    ShellWeighting weighting = ShellWeighting::geometric);

/// Fails when 2^{-k+1} q_k stops decaying over the finest shells.
bool bounded_variation_surrogate(const DiscretizedLevyMeasure& m);

/// ct + Σ η_i 1{tζ_i ≥ Γ_i}: the plain series for levy_measure_to_epsilon(m),
/// fused; bit-identical to simulate_plain on that spec with the same stream.
PathSample bounded_variation_series(const DiscretizedLevyMeasure& m, std::span<const double> grid,
                                    const LePageConfig& cfg, const RandomStream& stream,
                                    ShellWeighting weighting = ShellWeighting::geometric);

}  // namespace lepage
