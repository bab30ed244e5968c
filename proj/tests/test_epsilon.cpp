#include "lepage/epsilon.hpp"
#include "lepage/processes.hpp"

#include "oracles/oracle_values.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace lepage;

namespace {

std::vector<double> fine_grid(double hi, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = hi * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

std::vector<EpsilonSpec> every_family() {
    auto inner = drift_process(1.0);
    InnerSampler f = [inner](std::span<const double> t, RandomStream& s) { return inner.values_at(t, s); };
    return {
        EpsilonSpec::single_jump(ScalarLaw::normal(0, 1), ScalarLaw::uniform(0.5, 2)),
        EpsilonSpec::jump_at_eta(ScalarLaw::uniform(0.5, 2)),
        EpsilonSpec::power_scaled(0.7, ScalarLaw::rademacher()),
        EpsilonSpec::fbm(0.75),
        EpsilonSpec::deterministic_power(1.5, PowerVariant::power_minus_one),
        EpsilonSpec::integer_part(),
        EpsilonSpec::custom_step({{{0.5, 1.0}, {1.5, -2.0}}, {{2.0, 3.0}}}, {1.0, 2.0}),
        EpsilonSpec::composed(f, "drift", 0.5, true),
    };
}

}  // namespace

TEST(Epsilon, EveryFamilyVanishesAtZero) {
    const RandomStream root(1);
    for (const auto& spec : every_family()) {
        for (std::uint64_t i = 0; i < 50; ++i) {
            auto p = sample_path(spec, root.child(i));
            const double ts[3] = {0.0, 0.5, 3.0};
            EXPECT_EQ(p.values(ts)[0], 0.0) << spec.name();
        }
    }
}

TEST(Epsilon, SingleJumpIndicator) {
    auto p = sample_path(EpsilonSpec::single_jump(ScalarLaw::constant(1), ScalarLaw::constant(1)), RandomStream(2));
    EXPECT_EQ(p.value(0.999999), 0.0);
    EXPECT_EQ(p.value(1.0), 1.0);
    EXPECT_EQ(p.value(7.0), 1.0);
    EXPECT_EQ(p.kind(), PathKind::piecewise_constant);
}

TEST(Epsilon, IntegerPartValues) {
    auto p = sample_path(EpsilonSpec::integer_part(), RandomStream(3));
    EXPECT_EQ(p.value(2.7), 2.0);
    EXPECT_EQ(p.value(0.3), 0.0);
    EXPECT_EQ(p.value(3.0), 3.0);
}

TEST(Epsilon, DeterministicPowerValues) {
    auto p = sample_path(EpsilonSpec::deterministic_power(1.0, PowerVariant::shifted_power), RandomStream(4));
    EXPECT_DOUBLE_EQ(p.value(3.0), 2.0);
    EXPECT_EQ(p.value(0.5), 0.0);
    auto q = sample_path(EpsilonSpec::deterministic_power(2.0, PowerVariant::power_minus_one), RandomStream(4));
    EXPECT_DOUBLE_EQ(q.value(3.0), 8.0);
    EXPECT_EQ(q.value(0.9), 0.0);
}

TEST(Epsilon, PowerScaledShape) {
    auto p = sample_path(EpsilonSpec::power_scaled(0.5, ScalarLaw::constant(2.0)), RandomStream(5));
    EXPECT_DOUBLE_EQ(p.value(3.0), 18.0);
}

TEST(Epsilon, NonnegativeFamiliesAreMonotone) {
    const std::vector<EpsilonSpec> specs = {
        EpsilonSpec::single_jump(ScalarLaw::uniform(0, 2), ScalarLaw::exponential(1)),
        EpsilonSpec::jump_at_eta(ScalarLaw::uniform(0.1, 3)),
        EpsilonSpec::integer_part(),
        EpsilonSpec::deterministic_power(1.3, PowerVariant::shifted_power),
        EpsilonSpec::custom_step({{{0.5, 1.0}, {1.5, 2.0}}, {{0.2, 0.1}, {0.3, 0.4}}}, {1.0, 1.0}),
    };
    const auto grid = fine_grid(10.0, 1000);
    const RandomStream root(6);
    for (const auto& spec : specs) {
        EXPECT_TRUE(spec.monotone_nonnegative()) << spec.name();
        for (std::uint64_t i = 0; i < 100; ++i) {
            const auto v = sample_path(spec, root.child(i)).values(grid);
            for (std::size_t j = 1; j < v.size(); ++j) ASSERT_GE(v[j], v[j - 1]) << spec.name();
            ASSERT_GE(v.front(), 0.0);
        }
    }
}

TEST(Epsilon, JumpRecordReproducesPath) {
    const std::vector<EpsilonSpec> specs = {
        EpsilonSpec::single_jump(ScalarLaw::normal(0, 1), ScalarLaw::exponential(2)),
        EpsilonSpec::jump_at_eta(ScalarLaw::exponential(1)),
        EpsilonSpec::integer_part(),
        EpsilonSpec::custom_step({{{0.5, 1.0}, {1.5, -2.0}}, {{2.0, 3.0}}}, {1.0, 2.0}),
    };
    const auto grid = fine_grid(12.0, 1000);
    const RandomStream root(7);
    for (const auto& spec : specs) {
        for (std::uint64_t i = 0; i < 100; ++i) {
            auto p = sample_path(spec, root.child(i));
            const auto v = p.values(grid);
            const auto js = p.jump_record(12.0);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                double acc = 0.0;
                for (const auto& jp : js)
                    if (jp.time <= grid[j]) acc += jp.height;
                ASSERT_EQ(acc, v[j]) << spec.name() << " t=" << grid[j];
            }
        }
    }
}

TEST(Epsilon, ContinuousPathHasNoJumpRecord) {
    auto p = sample_path(EpsilonSpec::power_scaled(1.0, ScalarLaw::rademacher()), RandomStream(8));
    EXPECT_THROW(p.jump_record(), std::logic_error);
}

TEST(Epsilon, SameStreamSamePath) {
    const auto grid = fine_grid(5.0, 50);
    for (const auto& spec : every_family()) {
        auto a = sample_path(spec, RandomStream(9).child(1)).values(grid);
        auto b = sample_path(spec, RandomStream(9).child(1)).values(grid);
        EXPECT_EQ(a, b) << spec.name();
    }
}

TEST(Epsilon, ParameterRangesValidated) {
    EXPECT_THROW(EpsilonSpec::fbm(0.5), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::fbm(1.0), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::power_scaled(2.0, ScalarLaw::constant(1)), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::power_scaled(0.0, ScalarLaw::constant(1)), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::jump_at_eta(ScalarLaw::normal(0, 1)), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::single_jump(ScalarLaw::constant(1), ScalarLaw::normal(1, 1)), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::custom_step({{{1.0, 1.0}, {1.0, 2.0}}}, {1.0}), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::custom_step({{{0.0, 1.0}}}, {1.0}), std::invalid_argument);
    EXPECT_THROW(EpsilonSpec::custom_step({{{1.0, 0.0}}}, {1.0}), std::invalid_argument);
    InnerSampler f = [](std::span<const double> t, RandomStream&) { return std::vector<double>(t.begin(), t.end()); };
    EXPECT_THROW(EpsilonSpec::composed(f, "id", 1.0, true), std::invalid_argument);
    EXPECT_NO_THROW(EpsilonSpec::composed(f, "id", 0.5, false));
}

TEST(Epsilon, ComposedEvaluatesInnerAtPowerTime) {
    auto inner = drift_process(1.0);
    InnerSampler f = [inner](std::span<const double> t, RandomStream& s) { return inner.values_at(t, s); };
    auto p = sample_path(EpsilonSpec::composed(f, "drift", 0.5, true), RandomStream(10));
    const double ts[3] = {0.0, 2.0, 3.0};
    const auto v = p.values(ts);
    EXPECT_DOUBLE_EQ(v[1], 4.0);
    EXPECT_DOUBLE_EQ(v[2], 9.0);
}

TEST(Epsilon, ComposedCertificateFlag) {
    InnerSampler f = [](std::span<const double> t, RandomStream&) { return std::vector<double>(t.begin(), t.end()); };
    EXPECT_FALSE(EpsilonSpec::composed(f, "id", 0.5, false).abs_certified());
    EXPECT_TRUE(EpsilonSpec::composed(f, "id", 0.5, true).abs_certified());
}

TEST(FbmSample, CovarianceAtOneAndTwo) {
    const RandomStream root(11);
    const double ts[2] = {1.0, 2.0};
    double s11 = 0, s12 = 0, s22 = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
        RandomStream s = root.child(i);
        const auto v = fbm_sample(0.75, ts, s);
        s11 += v[0] * v[0];
        s12 += v[0] * v[1];
        s22 += v[1] * v[1];
    }
    EXPECT_NEAR(s11 / n, 1.0, 0.03);
    EXPECT_NEAR(s12 / n, 0.5 * (1.0 + oracle::fbm_cov_22 - 1.0), 0.05);
    EXPECT_NEAR(s22 / n, oracle::fbm_cov_22, 0.1);
}

TEST(Integrability, SingleJumpAbsIsOne) {
    const auto v = check_integrability(EpsilonSpec::single_jump(ScalarLaw::constant(1), ScalarLaw::constant(1)),
                                       IntegrabilityMode::abs);
    EXPECT_NEAR(v.estimate, 1.0, 0.02);
    EXPECT_EQ(v.verdict, IntegrabilityVerdict::Outcome::finite);
}

TEST(Integrability, FbmSquareUnitInterval) {
    QuadratureBudget b;
    b.draws = 2000;
    const auto v = check_integrability(EpsilonSpec::fbm(0.75), IntegrabilityMode::square, b);
    EXPECT_LE(v.unit_interval, oracle::fbm_unit_square_bound);
    EXPECT_GT(v.unit_interval, 0.0);
    EXPECT_EQ(v.verdict, IntegrabilityVerdict::Outcome::finite);
}

TEST(Integrability, CauchyAbsSuspectedDivergent) {
    const auto v = check_integrability(EpsilonSpec::power_scaled(1.0, ScalarLaw::rademacher()), IntegrabilityMode::abs);
    EXPECT_EQ(v.verdict, IntegrabilityVerdict::Outcome::suspected_divergent);
    EXPECT_GE(v.estimate, 0.0);
    EXPECT_FALSE(v.horizon_trace.empty());
}

TEST(Integrability, SingleJumpSquareIdentity) {
    // E[min(1, eta^2) zeta] with eta ~ U(0,2), zeta ~ U(0.5,1.5): (2/3)*1
    const auto spec = EpsilonSpec::single_jump(ScalarLaw::uniform(0, 2), ScalarLaw::uniform(0.5, 1.5));
    QuadratureBudget b;
    b.draws = 40000;
    const auto v = check_integrability(spec, IntegrabilityMode::square, b);
    EXPECT_NEAR(v.estimate, 2.0 / 3.0, 0.01);
}

TEST(Integrability, EstimateNonnegative) {
    QuadratureBudget b;
    b.draws = 500;
    for (const auto& spec : every_family()) {
        for (auto mode : {IntegrabilityMode::abs, IntegrabilityMode::square}) {
            const auto v = check_integrability(spec, mode, b);
            EXPECT_GE(v.estimate, 0.0) << spec.name();
        }
    }
}
