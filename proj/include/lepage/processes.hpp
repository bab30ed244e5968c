#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/random.hpp"
#include "lepage/series.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lepage {

struct Claims {
    bool time_stable = false;
    bool nonnegative = false;
    bool nondecreasing = false;
    bool pure_jump = false;
    bool gaussian = false;
    bool levy = false;  // independent stationary increments

    std::vector<std::string> names() const;
};

/// A path-level process. Sampling is pure given the stream; the sampler object
/// is immutable and safe to share across threads.
class ProcessSampler {
public:
    /// Receives a sorted, duplicate-free grid starting at 0.
    using Fn = std::function<PathSample(const std::vector<double>& grid, const RandomStream& stream)>;

    ProcessSampler(std::string label, Claims claims, Fn fn);

    /// Path on normalize_grid(grid).
    PathSample sample(std::span<const double> grid, const RandomStream& stream) const;
    /// Values at arbitrary nonnegative times (any order), one joint draw.
    std::vector<double> values_at(std::span<const double> times, const RandomStream& stream) const;

    const std::string& label() const { return label_; }
    const Claims& claims() const { return claims_; }
    /// Free-form diagnostics gathered at construction (guards, truncation notes).
    const std::vector<std::string>& notes() const { return notes_; }
    ProcessSampler with_note(std::string note) const;

private:
    std::string label_;
    Claims claims_;
    std::shared_ptr<const Fn> fn_;
    std::vector<std::string> notes_;
};

// Primitives ---------------------------------------------------------------

/// LePage series process driven by the chosen engine.
ProcessSampler lepage_process(const EpsilonSpec& spec, const LePageConfig& cfg = {});
/// Poisson process with the given rate, as the LePage series with ε = 1{t·rate ≥ 1}.
ProcessSampler poisson_process(double rate = 1.0);
ProcessSampler brownian_motion(double sigma = 1.0);
ProcessSampler drift_process(double c);
/// Fractional Brownian motion, H in (0,1). Not time-stable unless H = 1/2.
ProcessSampler fbm_process(double hurst);
/// Gamma Lévy process with Lévy measure a·x⁻¹e^{-bx}dx (independent Gamma increments).
ProcessSampler gamma_process(double a, double b);

// Constructions ------------------------------------------------------------

/// Σ c_i ξ(t·s_i) over one underlying path.
ProcessSampler scale_combination(const ProcessSampler& p, std::vector<double> coeffs,
                                 std::vector<double> scales);

struct StableTerm {
    enum class Law { symmetric, positive };
    double coeff = 1.0;
    double alpha = 2.0;
    Law law = Law::symmetric;
    double scale = 1.0;  // symmetric: CF exp(-scale|λ|^α); positive: Laplace exp(-scale·λ^α)
};
/// ξ(t) = Σ c_i t^{1/α_i} ζ_i with independent strictly stable ζ_i.
ProcessSampler stable_scaled(std::vector<StableTerm> terms);

/// X(t) = ξ(t^{1/α} ζ), ζ positive α-stable with Laplace transform exp(-λ^α).
ProcessSampler sub_stable(const ProcessSampler& p, double alpha);

/// X(ξ(t)): a Lévy process run on the clock of a nonnegative nondecreasing process.
ProcessSampler subordinate(const ProcessSampler& levy, const ProcessSampler& subordinator);

/// ξ(t) = Z^{1/2} η(t^{1/(2αH)}), η fBm(H), Z positive α-stable.
ProcessSampler sub_gaussian(double hurst, double alpha);

/// t^a ζ(t^b), value 0 at t = 0. `time_stable` asserts that (a, b) matches the
/// scaling of p; the claim is dropped when probe paths do not vanish as t ↓ 0.
ProcessSampler power_time_change(const ProcessSampler& p, double a, double b, bool time_stable = true);

// Batches ------------------------------------------------------------------

/// Path i of a batch uses stream.child(i).
std::vector<PathSample> sample_batch(const ProcessSampler& p, std::span<const double> grid, std::size_t n,
                                     const RandomStream& stream, int threads = 1);

}  // namespace lepage
