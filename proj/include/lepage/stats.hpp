#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/processes.hpp"
#include "lepage/random.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lepage {

/// n rows of k values, row-major.
struct FDDSample {
    std::vector<double> grid;
    std::vector<double> data;

    FDDSample() = default;
    FDDSample(std::vector<double> grid, std::vector<double> data);

    std::size_t k() const { return grid.size(); }
    std::size_t n() const { return grid.empty() ? 0 : data.size() / grid.size(); }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * k(), k()}; }
    /// Single-coordinate sample.
    static FDDSample scalar(std::vector<double> values, double t = 1.0);
};

struct Provenance {
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> lineage;
    std::size_t n_x = 0, n_y = 0;
    std::vector<double> grid;
    std::size_t permutations = 0;
    std::vector<std::pair<std::string, std::string>> extra;
};

struct TestReport {
    enum class Decision { pass, reject };
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    Decision decision = Decision::pass;
    double alpha = 0.01;
    Provenance provenance;
    std::vector<std::pair<std::string, double>> details;

    bool passed() const { return decision == Decision::pass; }
    /// Sets decision from p_value and alpha.
    void decide();
    double detail(const std::string& key) const;
};

std::string to_string(TestReport::Decision d);

/// (1/n) Σ exp(i⟨θ, row⟩) per frequency vector θ.
std::vector<std::complex<double>> ecf(const FDDSample& s, const std::vector<std::vector<double>>& freqs);

struct EnergyOptions {
    std::size_t permutations = 999;
    double alpha = 0.01;
    /// Extra fixed random projection directions when k > 1 (coordinate axes are always used).
    std::size_t random_directions = 8;
    /// Apply the bounded arctan transform when a finite-variance diagnostic fails.
    bool heavy_tail_guard = true;
    int threads = 1;
};

/// Two-sample permutation test on a sliced energy distance: the mean over
/// projection directions of the one-dimensional energy statistic
/// (n_x n_y/(n_x+n_y))·(2E|X-Y| - E|X-X'| - E|Y-Y'|). p = (b+1)/(B+1).
TestReport energy_two_sample(const FDDSample& x, const FDDSample& y, const EnergyOptions& opts,
                             const RandomStream& stream);

/// Largest share of the squared deviations carried by one row, per coordinate;
/// values near 1/n indicate light tails, shares of order one indicate infinite variance.
double max_square_share(const FDDSample& s);
/// Threshold above which a sample of size n is treated as heavy tailed.
double heavy_tail_threshold(std::size_t n);

/// Arm A: sum of n independent paths on grid. Arm B: one path on n·grid.
/// With n = 1 both arms are the same paths, so the test passes trivially.
TestReport time_stability_test(const ProcessSampler& p, std::size_t n, std::span<const double> grid,
                               std::size_t paths_per_arm, const EnergyOptions& opts, const RandomStream& stream);

/// Arm A: ξ₁(a·t) + ξ₂(b·t). Arm B: ξ((a+b)·t).
TestReport ab_stability_test(const ProcessSampler& p, double a, double b, std::span<const double> grid,
                             std::size_t paths_per_arm, const EnergyOptions& opts, const RandomStream& stream);

struct CfMatchOptions {
    double drift_c = 0.0;
    QuadratureBudget quad_budget;
    int threads = 1;
};

/// sup_λ |ecf of ξ(t) - exp(-tΨ(λ))|; pass iff within tol + 3/√n.
TestReport cf_match_test(const ProcessSampler& p, const EpsilonSpec& spec, double t, std::span<const double> freqs,
                         std::size_t n, double tol, const RandomStream& stream, const CfMatchOptions& opts = {});

/// Same decision rule against a caller-supplied characteristic function.
TestReport cf_match_samples(std::span<const double> samples, std::span<const double> freqs,
                            const std::function<std::complex<double>(double)>& model, double tol);

struct ExponentialityOptions {
    double alpha = 0.01;
    std::size_t bootstrap = 999;
    std::uint64_t calibration_seed = 0xE4B0075;
};

/// Kolmogorov-Smirnov distance to the exponential law with the rate fitted by the mean.
double ks_exponential_statistic(std::span<const double> samples);
/// KS against the exponential family; p-value from a parametric bootstrap of the
/// fitted-rate statistic (which does not depend on the true rate).
TestReport exponentiality_test(std::span<const double> samples, const ExponentialityOptions& opts = {});

/// Ĉ(ut, us) vs u·Ĉ(t, s) per pair; pass iff every |difference| ≤ tol·|uĈ(t,s)| + 3 SE.
TestReport cov_homogeneity_test(const ProcessSampler& p, const std::vector<std::pair<double, double>>& pairs,
                                double u, std::size_t n, double tol, const RandomStream& stream, int threads = 1);

/// Chi-square goodness of fit of nonnegative integer samples against a pmf;
/// cells are pooled from the right so every expected count is at least 5.
TestReport discrete_gof_test(std::span<const double> samples, const std::function<double(int)>& pmf,
                             const std::string& name, double alpha = 0.01);
TestReport poisson_gof_test(std::span<const double> samples, double mean, double alpha = 0.01);

/// Two-sided normal tail probability 2(1 - Φ(|z|)).
double normal_two_sided(double z);
/// Asymptotic Kolmogorov distribution P(√n D > x) with Stephens' small-sample correction.
double kolmogorov_pvalue(double d, std::size_t n);

}  // namespace lepage
