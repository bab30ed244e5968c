#include "lepage/stats.hpp"
#include "lepage/processes.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

using namespace lepage;

namespace {

std::vector<double> normals(std::size_t n, double shift, const RandomStream& root) {
    RandomStream s = root;
    std::vector<double> v(n);
    for (auto& x : v) x = s.normal() + shift;
    return v;
}

}  // namespace

TEST(Ecf, BasicProperties) {
    const auto s = FDDSample::scalar(normals(500, 0.0, RandomStream(1)));
    const auto e = ecf(s, {{0.0}, {0.7}, {-0.7}});
    EXPECT_EQ(e[0], std::complex<double>(1.0, 0.0));
    EXPECT_NEAR(e[1].real(), e[2].real(), 1e-14);
    EXPECT_NEAR(e[1].imag(), -e[2].imag(), 1e-14);
    EXPECT_LE(std::abs(e[1]), 1.0 + 1e-14);
}

TEST(Ecf, ConstantSampleIsExact) {
    const FDDSample s({1.0, 2.0}, {0.5, 1.0, 0.5, 1.0});
    const auto e = ecf(s, {{1.0, 2.0}});
    EXPECT_NEAR(std::abs(e[0] - std::exp(std::complex<double>(0, 2.5))), 0.0, 1e-15);
}

TEST(Energy, IdenticalSamples) {
    const auto x = FDDSample::scalar(normals(100, 0.0, RandomStream(2)));
    const auto rep = energy_two_sample(x, x, {}, RandomStream(3));
    EXPECT_NEAR(rep.statistic, 0.0, 1e-9);
    EXPECT_EQ(rep.p_value, 1.0);
    EXPECT_TRUE(rep.passed());
}

TEST(Energy, NullCalibration) {
    // 200 independent null replicates at α = 0.05: rejections stay inside a
    // 4-sigma binomial band around 10
    EnergyOptions o;
    o.permutations = 199;
    o.alpha = 0.05;
    int rejects = 0;
    const RandomStream root(4);
    for (std::uint64_t r = 0; r < 200; ++r) {
        const RandomStream s = root.child(r);
        const auto x = FDDSample::scalar(normals(60, 0.0, s.child(0)));
        const auto y = FDDSample::scalar(normals(60, 0.0, s.child(1)));
        rejects += energy_two_sample(x, y, o, s.child(2)).passed() ? 0 : 1;
    }
    EXPECT_LE(rejects, 22);
    EXPECT_GE(rejects, 1);
}

TEST(Energy, DetectsShift) {
    const auto x = FDDSample::scalar(normals(300, 0.0, RandomStream(5)));
    const auto y = FDDSample::scalar(normals(300, 0.5, RandomStream(6)));
    const auto rep = energy_two_sample(x, y, {}, RandomStream(7));
    EXPECT_FALSE(rep.passed());
    EXPECT_NEAR(rep.p_value, 1.0 / 1000.0, 1e-12);
}

TEST(Energy, HeavyTailGuardFires) {
    RandomStream s(8);
    std::vector<double> c(400);
    for (auto& v : c) v = stable_symmetric(1.0, 1.0, s);
    const auto x = FDDSample::scalar(c);
    EXPECT_GT(max_square_share(x), heavy_tail_threshold(x.n()));
    const auto n = FDDSample::scalar(normals(400, 0.0, RandomStream(9)));
    EXPECT_LT(max_square_share(n), heavy_tail_threshold(n.n()));
}

TEST(Energy, SerialAndThreadedReportsAgree) {
    const auto x = FDDSample::scalar(normals(150, 0.0, RandomStream(10)));
    const auto y = FDDSample::scalar(normals(150, 0.2, RandomStream(11)));
    EnergyOptions a, b;
    b.threads = 4;
    EXPECT_EQ(energy_two_sample(x, y, a, RandomStream(12)).p_value, energy_two_sample(x, y, b, RandomStream(12)).p_value);
}

TEST(TimeStability, BrownianAndPoissonPass) {
    const std::vector<double> grid = {0.5, 1.0, 2.0};
    EXPECT_TRUE(time_stability_test(brownian_motion(), 3, grid, 800, {}, RandomStream(13)).passed());
    EXPECT_TRUE(time_stability_test(poisson_process(), 2, grid, 800, {}, RandomStream(14)).passed());
}

TEST(TimeStability, DriftIsExact) {
    const std::vector<double> grid = {1.0, 2.0};
    const auto rep = time_stability_test(drift_process(0.7), 4, grid, 50, {}, RandomStream(15));
    EXPECT_TRUE(rep.passed()) << rep.p_value << " " << rep.statistic;
    EXPECT_NEAR(rep.statistic, 0.0, 1e-9);
}

TEST(TimeStability, TrivialForOneCopy) {
    const std::vector<double> grid = {1.0};
    const auto rep = time_stability_test(fbm_process(0.8), 1, grid, 100, {}, RandomStream(16));
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.p_value, 1.0);
}

TEST(TimeStability, FbmRejected) {
    const std::vector<double> grid = {0.5, 1.0};
    EXPECT_FALSE(time_stability_test(fbm_process(0.8), 2, grid, 1000, {}, RandomStream(17)).passed());
}

TEST(AbStability, BrownianPassesFbmFails) {
    const std::vector<double> grid = {1.0};
    EXPECT_TRUE(ab_stability_test(brownian_motion(), 0.5, 1.5, grid, 800, {}, RandomStream(18)).passed());
    EXPECT_FALSE(ab_stability_test(fbm_process(0.85), 1.0, 1.0, grid, 1500, {}, RandomStream(19)).passed());
}

TEST(CfMatch, PoissonAgainstOwnCumulant) {
    const auto spec = EpsilonSpec::single_jump(ScalarLaw::constant(1), ScalarLaw::constant(1));
    const double freqs[] = {0.5, 1.0, 2.0};
    const auto rep = cf_match_test(poisson_process(), spec, 1.5, freqs, 4000, 0.01, RandomStream(20));
    EXPECT_TRUE(rep.passed()) << rep.statistic;
    const auto bad = cf_match_test(brownian_motion(), spec, 1.5, freqs, 4000, 0.01, RandomStream(21));
    EXPECT_FALSE(bad.passed());
}

TEST(CfMatch, SamplesAgainstModel) {
    const auto v = normals(5000, 0.0, RandomStream(22));
    const double freqs[] = {0.5, 1.0};
    auto gauss = [](double l) { return std::complex<double>(std::exp(-0.5 * l * l), 0.0); };
    EXPECT_TRUE(cf_match_samples(v, freqs, gauss, 0.0).passed());
    auto wide = [](double l) { return std::complex<double>(std::exp(-2.0 * l * l), 0.0); };
    EXPECT_FALSE(cf_match_samples(v, freqs, wide, 0.0).passed());
}

TEST(Exponentiality, ExponentialPasses) {
    RandomStream s(23);
    std::vector<double> v(1000);
    for (auto& x : v) x = 3.0 * s.exponential();
    EXPECT_TRUE(exponentiality_test(v).passed());
}

TEST(Exponentiality, UniformAndConstantRejected) {
    RandomStream s(24);
    std::vector<double> u(1000);
    for (auto& x : u) x = s.uniform();
    EXPECT_FALSE(exponentiality_test(u).passed());
    const std::vector<double> c(200, 2.0);
    EXPECT_FALSE(exponentiality_test(c).passed());
}

TEST(Exponentiality, StatisticIsScaleFree) {
    RandomStream s(25);
    std::vector<double> v(300), w(300);
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = s.exponential();
        w[i] = 8.0 * v[i];
    }
    EXPECT_NEAR(ks_exponential_statistic(v), ks_exponential_statistic(w), 1e-12);
}

TEST(CovHomogeneity, BrownianPassesFbmFails) {
    const std::vector<std::pair<double, double>> pairs = {{1.0, 1.0}, {0.5, 1.0}};
    EXPECT_TRUE(cov_homogeneity_test(brownian_motion(), pairs, 2.0, 4000, 0.02, RandomStream(26)).passed());
    EXPECT_FALSE(cov_homogeneity_test(fbm_process(0.8), pairs, 2.0, 4000, 0.02, RandomStream(27)).passed());
}

TEST(CovHomogeneity, UnitScaleIsExact) {
    const std::vector<std::pair<double, double>> pairs = {{1.0, 2.0}};
    const auto rep = cov_homogeneity_test(fbm_process(0.3), pairs, 1.0, 500, 0.0, RandomStream(28));
    EXPECT_TRUE(rep.passed());
    EXPECT_NEAR(rep.statistic, 0.0, 1e-12);
}

TEST(Gof, PoissonSamples) {
    RandomStream s(29);
    std::vector<double> v(3000);
    for (auto& x : v) x = static_cast<double>(s.poisson(2.0));
    EXPECT_TRUE(poisson_gof_test(v, 2.0).passed());
    EXPECT_FALSE(poisson_gof_test(v, 2.3).passed());
}

TEST(Decision, FollowsAlpha) {
    TestReport r;
    r.alpha = 0.05;
    r.p_value = 0.049;
    r.decide();
    EXPECT_FALSE(r.passed());
    r.p_value = 0.05;
    r.decide();
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(to_string(TestReport::Decision::reject), "reject");
}

TEST(Helpers, TailProbabilities) {
    EXPECT_NEAR(normal_two_sided(1.959963984540054), 0.05, 1e-12);
    EXPECT_NEAR(kolmogorov_pvalue(0.0, 100), 1.0, 1e-12);
    EXPECT_LT(kolmogorov_pvalue(0.3, 100), 1e-6);
}
