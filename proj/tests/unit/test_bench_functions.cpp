#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "surroflow/bench_functions.hpp"

using namespace surroflow;

namespace {

// Independent textbook forms, written out separately from the library.
double rosenbrock(double x, double y) { return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x); }
double himmelblau(double x, double y) {
    return (x * x + y - 11.0) * (x * x + y - 11.0) + (x + y * y - 7.0) * (x + y * y - 7.0);
}
double booth(double x, double y) { return (x + 2 * y - 7) * (x + 2 * y - 7) + (2 * x + y - 5) * (2 * x + y - 5); }
double ackley(double x, double y) {
    const double pi = std::numbers::pi;
    return -20.0 * std::exp(-0.2 * std::sqrt(0.5 * (x * x + y * y))) -
           std::exp(0.5 * (std::cos(2 * pi * x) + std::cos(2 * pi * y))) + std::numbers::e + 20.0;
}
double rastrigin(double x, double y) {
    const double pi = std::numbers::pi;
    return 20.0 + x * x - 10.0 * std::cos(2 * pi * x) + y * y - 10.0 * std::cos(2 * pi * y);
}

double eval2(const BenchmarkSpec& s, double x, double y) {
    const std::array<double, 2> p{x, y};
    return eval_benchmark(s, p);
}

}  // namespace

TEST(BenchFunctions, KnownMinimaEvaluateToZero) {
    EXPECT_NEAR(eval2(benchmark_by_name("rosenbrock"), 1, 1), 0.0, 1e-15);
    EXPECT_NEAR(eval2(benchmark_by_name("booth"), 1, 3), 0.0, 1e-15);
    EXPECT_NEAR(eval2(benchmark_by_name("rastrigin"), 0, 0), 0.0, 1e-15);
    EXPECT_NEAR(eval2(benchmark_by_name("ackley"), 0, 0), 0.0, 1e-14);
}

TEST(BenchFunctions, HimmelblauRoundedSecondMinimumIsSmall) {
    // The two-decimal location (3.58, -1.85) gives 1.135e-3; the exact minimum
    // is at (3.584428, -1.848126). The rounded point is checked at 5e-3.
    const double v = eval2(benchmark_by_name("himmelblau"), 3.58, -1.85);
    EXPECT_NEAR(v, himmelblau(3.58, -1.85), 1e-12);
    EXPECT_LE(v, 5e-3);
    EXPECT_LE(eval2(benchmark_by_name("himmelblau"), 3.584428340330, -1.848126526964), 1e-12);
}

TEST(BenchFunctions, MatchesIndependentForms) {
    const std::array<std::array<double, 2>, 5> pts{{{0.3, -1.2}, {-1.7, 0.4}, {1.1, 1.9}, {-0.2, -0.9}, {0.0, 0.5}}};
    for (const auto& p : pts) {
        EXPECT_NEAR(eval2(benchmark_by_name("rosenbrock"), p[0], p[1]), rosenbrock(p[0], p[1]), 1e-10);
        EXPECT_NEAR(eval2(benchmark_by_name("himmelblau"), p[0], p[1]), himmelblau(p[0], p[1]), 1e-10);
        EXPECT_NEAR(eval2(benchmark_by_name("booth"), p[0], p[1]), booth(p[0], p[1]), 1e-10);
        EXPECT_NEAR(eval2(benchmark_by_name("ackley"), p[0], p[1]), ackley(p[0], p[1]), 1e-12);
        EXPECT_NEAR(eval2(benchmark_by_name("rastrigin"), p[0], p[1]), rastrigin(p[0], p[1]), 1e-10);
    }
}

TEST(BenchFunctions, SpecInvariants) {
    for (const auto& name : benchmark_names()) {
        const auto spec = benchmark_by_name(name);
        for (std::size_t d = 0; d < spec.dim(); ++d) EXPECT_LT(spec.domain()[d].lo, spec.domain()[d].hi);
        ASSERT_FALSE(spec.known_optima().empty());
        for (const auto& opt : spec.known_optima()) {
            EXPECT_TRUE(spec.domain().contains(opt.location)) << name;
            EXPECT_NEAR(spec(opt.location), opt.value, 1e-9) << name;
        }
    }
}

TEST(BenchFunctions, RejectsWrongDimensionAndUnknownName) {
    const auto spec = benchmark_by_name("booth");
    const std::array<double, 3> p{0, 0, 0};
    EXPECT_THROW(eval_benchmark(spec, p), InvalidInput);
    EXPECT_THROW(benchmark_by_name("sphere9"), InvalidInput);
}

TEST(BenchFunctions, TrueOptimumLists) {
    const auto booth_opt = true_optimum(benchmark_by_name("booth"));
    ASSERT_EQ(booth_opt.size(), 1u);
    EXPECT_DOUBLE_EQ(booth_opt[0].location[0], 1.0);
    EXPECT_DOUBLE_EQ(booth_opt[0].location[1], 3.0);
    EXPECT_DOUBLE_EQ(booth_opt[0].value, 0.0);

    const auto ack = true_optimum(benchmark_by_name("ackley"));
    ASSERT_EQ(ack.size(), 1u);
    EXPECT_DOUBLE_EQ(ack[0].location[0], 0.0);
    EXPECT_DOUBLE_EQ(ack[0].location[1], 0.0);

    const auto him = true_optimum(benchmark_by_name("himmelblau"));
    EXPECT_EQ(him.size(), 4u);
    bool has_3_2 = false;
    bool has_358 = false;
    for (const auto& o : him) {
        EXPECT_NEAR(o.value, 0.0, 1e-12);
        if (std::abs(o.location[0] - 3) < 1e-12 && std::abs(o.location[1] - 2) < 1e-12) has_3_2 = true;
        if (std::abs(o.location[0] - 3.58) < 0.01 && std::abs(o.location[1] + 1.85) < 0.01) has_358 = true;
    }
    EXPECT_TRUE(has_3_2);
    EXPECT_TRUE(has_358);
}

TEST(BenchFunctions, NoiselessSamplesEqualAnalyticValues) {
    const auto spec = benchmark_by_name("rosenbrock");
    const auto set = sample_stochastic(spec, 10, NoiseModel{NoiseKind::kNone, 0.0, 42});
    ASSERT_EQ(set.size(), 10u);
    for (const auto& s : set) {
        EXPECT_TRUE(spec.domain().contains(s.location));
        EXPECT_EQ(s.value, spec(s.location));  // bit-identical
    }
}

TEST(BenchFunctions, SameSeedSameSamples) {
    const auto spec = benchmark_by_name("ackley");
    const NoiseModel noise{NoiseKind::kAdditiveGaussian, 0.1, 7};
    EXPECT_TRUE(sample_stochastic(spec, 50, noise) == sample_stochastic(spec, 50, noise));
    const NoiseModel other{NoiseKind::kAdditiveGaussian, 0.1, 8};
    EXPECT_FALSE(sample_stochastic(spec, 50, noise) == sample_stochastic(spec, 50, other));
}

TEST(BenchFunctions, GaussianNoiseHasZeroMean) {
    const auto spec = benchmark_by_name("himmelblau");
    const auto set = sample_stochastic(spec, 10000, NoiseModel{NoiseKind::kAdditiveGaussian, 0.1, 3});
    double sum = 0.0;
    double sq = 0.0;
    for (const auto& s : set) {
        const double e = s.value - himmelblau(s.location[0], s.location[1]);
        sum += e;
        sq += e * e;
    }
    const double mean = sum / 10000.0;
    EXPECT_LE(std::abs(mean), 0.01);
    EXPECT_NEAR(std::sqrt(sq / 10000.0), 0.1, 0.005);
}

TEST(BenchFunctions, NoiseModelValidation) {
    EXPECT_THROW((NoiseModel{NoiseKind::kAdditiveGaussian, -0.1, 0}).validate(), InvalidInput);
    EXPECT_NO_THROW((NoiseModel{NoiseKind::kNone, 0.0, 0}).validate());
}

TEST(BenchFunctions, NoisyOracleIsReproducible) {
    const auto spec = benchmark_by_name("booth");
    NoisyOracle a(spec, NoiseModel{NoiseKind::kAdditiveGaussian, 0.5, 11});
    NoisyOracle b(spec, NoiseModel{NoiseKind::kAdditiveGaussian, 0.5, 11});
    const std::array<double, 2> p{0.5, 0.5};
    for (int i = 0; i < 20; ++i) EXPECT_EQ(a(p), b(p));
}

TEST(SeedDerivation, StreamsDiffer) {
    EXPECT_NE(derive_seed(0, 1), derive_seed(0, 2));
    EXPECT_NE(derive_seed(0, 1), derive_seed(1, 1));
    EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}
