#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "surroflow/algorithm1.hpp"
#include "surroflow/ricci_flow.hpp"
#include "surroflow/run_config.hpp"

using namespace surroflow;

namespace {

MetricField field_from(const std::function<double(double, double)>& u, double lo, double hi, std::size_t n) {
    MetricField m;
    m.x = GridAxis{lo, hi, n};
    m.y = GridAxis{lo, hi, n};
    m.u = Grid2D(n, n);
    m.objective = Grid2D(n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) m.u(r, c) = u(m.x.coord(c), m.y.coord(r));
    return m;
}

FourierSurrogate constant_surrogate(double v) {
    FourierSurrogate s(2, Domain({{-1, 1}, {-1, 1}}), 2.0);
    const std::array<int, 2> zero{0, 0};
    s.coefficient(zero) = v;
    return s;
}

double bump(double x, double y) { return std::exp(-((x - 0.2) * (x - 0.2) + (y + 0.1) * (y + 0.1)) / (2 * 0.15 * 0.15)); }

FlowConfig small_grid(std::size_t n) {
    FlowConfig cfg;
    cfg.nx = n;
    cfg.ny = n;
    return cfg;
}

CurvatureField field_with(std::size_t n, double fill) {
    return CurvatureField{GridAxis{-1, 1, n}, GridAxis{-1, 1, n}, Grid2D(n, n, fill)};
}

}  // namespace

TEST(InitMetric, ConstantSurrogateIsFlat) {
    const auto m = init_metric(constant_surrogate(4.0), small_grid(50), Sense::kMin);
    const double u0 = m.u(0, 0);
    for (double v : m.u.values()) EXPECT_EQ(v, u0);
    const auto k = gaussian_curvature(m);
    for (double v : k.k.values()) EXPECT_LE(std::abs(v), 1e-10);
}

TEST(InitMetric, ZeroBetaGivesZeroMetric) {
    auto cfg = small_grid(40);
    cfg.beta = 0.0;
    FourierSurrogate s(2, Domain({{-1, 1}, {-1, 1}}), 2.0);
    const std::array<int, 2> k1{1, 0}, km1{-1, 0};
    s.coefficient(k1) = 0.7;
    s.coefficient(km1) = 0.7;
    const auto m = init_metric(s, cfg, Sense::kMin);
    for (double v : m.u.values()) EXPECT_EQ(v, 0.0);
}

TEST(InitMetric, SoughtExtremumIsTheMetricMinimum) {
    // The objective is normalised so that the sought extremum maps to zero;
    // for sense = max the grid argmax of F is therefore the grid argmin of u.
    const std::size_t n = 81;
    const GridAxis ax{-1, 1, n};
    Grid2D obj(n, n);
    std::size_t best = 0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            obj(r, c) = bump(ax.coord(c), ax.coord(r));
            if (obj.values()[r * n + c] > obj.values()[best]) best = r * n + c;
        }
    }
    const auto m = init_metric(obj, ax, ax, small_grid(n), Sense::kMax);
    const auto uv = m.u.values();
    const auto argmin_u = static_cast<std::size_t>(std::min_element(uv.begin(), uv.end()) - uv.begin());
    EXPECT_EQ(argmin_u, best);
    // And the curvature magnitude peaks there too.
    const auto k = gaussian_curvature(m);
    const auto kv = k.k.values();
    std::size_t kbest = 0;
    for (std::size_t i = 0; i < kv.size(); ++i)
        if (std::abs(kv[i]) > std::abs(kv[kbest])) kbest = i;
    EXPECT_EQ(kbest, best);
    // Calibration: initial peak |K| equals the configured fraction of the blow-up threshold.
    EXPECT_NEAR(std::abs(kv[kbest]), 0.25 * 1e3, 1e-6 * 250);
}

TEST(GaussianCurvature, ConstantMetricIsFlat) {
    const auto m = field_from([](double, double) { return 2.5; }, -1, 1, 33);
    for (double v : gaussian_curvature(m).k.values()) EXPECT_LE(std::abs(v), 1e-10);
}

TEST(GaussianCurvature, ParaboloidMatchesAnalyticLaplacian) {
    // u = -(x^2 + y^2)/4: Laplacian -1, so K = exp((x^2 + y^2)/2); K(0,0) = 1.
    const auto m = field_from([](double x, double y) { return -(x * x + y * y) / 4.0; }, -1, 1, 41);
    const auto k = gaussian_curvature(m);
    EXPECT_NEAR(k.k(20, 20), 1.0, 1e-10);
    for (std::size_t r = 0; r < 41; ++r) {
        for (std::size_t c = 0; c < 41; ++c) {
            const double x = m.x.coord(c);
            const double y = m.y.coord(r);
            EXPECT_NEAR(k.k(r, c), std::exp((x * x + y * y) / 2.0), 1e-8) << r << "," << c;
        }
    }
}

TEST(GaussianCurvature, SecondOrderConvergence) {
    // K = -exp(-2u) (u_xx + u_yy) with the Laplacian computed analytically.
    const auto u = [](double x, double y) { return 0.3 * std::sin(1.7 * x) * std::cos(1.3 * y) + 0.1 * x * y; };
    const auto exact = [&](double x, double y) {
        const double lap = -0.3 * (1.7 * 1.7 + 1.3 * 1.3) * std::sin(1.7 * x) * std::cos(1.3 * y);
        return -std::exp(-2.0 * u(x, y)) * lap;
    };
    std::vector<double> errs;
    for (std::size_t n : {21u, 41u, 81u, 161u}) {
        const auto m = field_from(u, -1, 1, n);
        const auto k = gaussian_curvature(m);
        double e = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                e = std::max(e, std::abs(k.k(r, c) - exact(m.x.coord(c), m.y.coord(r))));
        errs.push_back(e);
    }
    for (std::size_t i = 1; i < errs.size(); ++i) {
        const double ratio = errs[i - 1] / errs[i];
        EXPECT_NEAR(ratio, 4.0, 0.5) << "refinement " << i;
    }
}

TEST(FlowStep, FlatMetricIsAFixedPoint) {
    const auto start = init_metric(constant_surrogate(-1.0), small_grid(60), Sense::kMin);
    for (auto dir : {FlowDirection::kInverse, FlowDirection::kForward}) {
        auto m = start;
        for (int i = 0; i < 300; ++i) m = flow_step(m, small_grid(60), dir);
        double drift = 0.0;
        for (std::size_t i = 0; i < m.u.size(); ++i) drift = std::max(drift, std::abs(m.u.values()[i] - start.u.values()[i]));
        EXPECT_LE(drift, 1e-12);
    }
}

TEST(FlowStep, InverseRaisesPositiveCurvaturePeak) {
    // u = -(x^2+y^2)/4 has K > 0 everywhere; the centre value rises under the inverse flow.
    const auto m = field_from([](double x, double y) { return -(x * x + y * y) / 4.0; }, -1, 1, 41);
    FlowConfig cfg = small_grid(41);
    const auto next = flow_step(m, cfg, FlowDirection::kInverse);
    EXPECT_GT(next.u(20, 20), m.u(20, 20));
    const auto back = flow_step(m, cfg, FlowDirection::kForward);
    EXPECT_LT(back.u(20, 20), m.u(20, 20));
}

TEST(FlowStep, RejectsUnstableStep) {
    const auto m = field_from([](double x, double y) { return -(x * x + y * y) / 4.0; }, -1, 1, 41);
    FlowConfig cfg = small_grid(41);
    cfg.dt = 1.0;
    EXPECT_THROW(flow_step(m, cfg, FlowDirection::kInverse), UnstableStep);
}

TEST(FlowStep, FrozenCellsDoNotMove) {
    const auto m = field_from([](double x, double y) { return -(x * x + y * y) / 4.0; }, -1, 1, 21);
    std::vector<std::uint8_t> frozen(21 * 21, 0);
    frozen[10 * 21 + 10] = 1;
    const auto next = flow_step(m, small_grid(21), FlowDirection::kInverse, frozen);
    EXPECT_EQ(next.u(10, 10), m.u(10, 10));
    EXPECT_NE(next.u(10, 11), m.u(10, 11));
}

TEST(DetectSingularities, ConstantFieldHasNoCandidates) {
    const std::size_t n = 30;
    const auto m = field_from([](double, double) { return 0.0; }, -1, 1, n);
    EXPECT_TRUE(detect_singularities(field_with(n, 5e3), m, small_grid(n)).empty());
    EXPECT_TRUE(detect_singularities(field_with(n, 0.0), m, small_grid(n)).empty());
}

TEST(DetectSingularities, SingleSpike) {
    const std::size_t n = 30;
    const auto m = field_from([](double, double) { return 0.0; }, -1, 1, n);
    auto k = field_with(n, 1.0);
    const FlowConfig cfg = small_grid(n);
    k.k(12, 17) = 10 * cfg.blowup_threshold;
    const auto c = detect_singularities(k, m, cfg);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].row, 12u);
    EXPECT_EQ(c[0].col, 17u);
    EXPECT_GE(c[0].peak_curvature, cfg.blowup_threshold);
}

TEST(DetectSingularities, CloseSpikesMergeToTheLarger) {
    const std::size_t n = 30;
    const auto m = field_from([](double, double) { return 0.0; }, -1, 1, n);
    auto k = field_with(n, 1.0);
    const FlowConfig cfg = small_grid(n);
    k.k(10, 10) = 5 * cfg.blowup_threshold;
    k.k(12, 13) = 8 * cfg.blowup_threshold;  // within the 5-cell freeze radius
    const auto c = detect_singularities(k, m, cfg);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].row, 12u);
    EXPECT_EQ(c[0].col, 13u);
    // Far apart: both survive.
    k.k(25, 2) = 3 * cfg.blowup_threshold;
    EXPECT_EQ(detect_singularities(k, m, cfg).size(), 2u);
}

TEST(Optimize, GaussianBumpMaximumAndMonotonePeak) {
    const Domain d({{-1, 1}, {-1, 1}});
    const auto res = optimize([](std::span<const double> p) { return bump(p[0], p[1]); }, d, FlowConfig{}, Sense::kMax);
    ASSERT_EQ(res.status, OptimizeStatus::kFound);
    const auto& first = res.detections.front();
    const double h = 2.0 / 199.0;
    EXPECT_LE(std::abs(first.location[0] - 0.2), 2 * h);
    EXPECT_LE(std::abs(first.location[1] + 0.1), 2 * h);
    for (std::size_t i = 1; i < first.iteration && i < res.peak_curvature_trace.size(); ++i) {
        EXPECT_GE(res.peak_curvature_trace[i], res.peak_curvature_trace[i - 1]);
    }
}

TEST(Optimize, QuadraticBowlAgainstGridMinimum) {
    const Domain d({{-2, 2}, {-2, 2}});
    const auto f = [](std::span<const double> p) { return p[0] * p[0] + p[1] * p[1]; };
    // Brute-force oracle on the same grid.
    const GridAxis ax{-2, 2, 200};
    double bx = 0, by = 0, bv = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < 200; ++r)
        for (std::size_t c = 0; c < 200; ++c) {
            const std::array<double, 2> p{ax.coord(c), ax.coord(r)};
            if (f(p) < bv) { bv = f(p); bx = p[0]; by = p[1]; }
        }
    const auto res = optimize(f, d, FlowConfig{}, Sense::kMin, f);
    ASSERT_EQ(res.status, OptimizeStatus::kFound);
    const auto& b = res.best();
    EXPECT_LE(std::hypot(b.location[0], b.location[1]), 0.1);
    EXPECT_LE(std::hypot(b.location[0] - bx, b.location[1] - by), 2 * ax.spacing());
    for (const auto& c : res.candidates) EXPECT_GE(c.peak_curvature, FlowConfig{}.blowup_threshold);
}

TEST(Optimize, SenseSymmetry) {
    const Domain d({{-5, 5}, {-5, 5}});
    const auto spec = benchmark_by_name("himmelblau");
    const auto f = spec.as_field();
    const auto neg = [&](std::span<const double> p) { return -f(p); };
    const auto a = optimize(f, d, FlowConfig{}, Sense::kMin, f);
    const auto b = optimize(neg, d, FlowConfig{}, Sense::kMax, neg);
    ASSERT_EQ(a.status, OptimizeStatus::kFound);
    ASSERT_EQ(b.status, OptimizeStatus::kFound);
    const double h = 10.0 / 199.0;
    EXPECT_LE(std::abs(a.best().location[0] - b.best().location[0]), h);
    EXPECT_LE(std::abs(a.best().location[1] - b.best().location[1]), h);
}

TEST(Optimize, DeterministicBoothAndRastrigin) {
    const auto booth = benchmark_by_name("booth");
    const auto rb = build_dense_surrogate(booth, DenseFitConfig{});
    const auto ob = optimize(rb.surrogate, FlowConfig{}, Sense::kMin, booth.as_field());
    ASSERT_EQ(ob.status, OptimizeStatus::kFound);
    EXPECT_LE(std::abs(ob.best().location[0] - 1.0), 0.1);
    EXPECT_LE(std::abs(ob.best().location[1] - 3.0), 0.1);
    EXPECT_LE(*ob.best().true_value, 0.05);

    const auto rast = benchmark_by_name("rastrigin");
    const auto rr = build_dense_surrogate(rast, DenseFitConfig{});
    const auto orr = optimize(rr.surrogate, FlowConfig{}, Sense::kMin, rast.as_field());
    ASSERT_EQ(orr.status, OptimizeStatus::kFound);
    EXPECT_LE(*orr.best().true_value, 0.2);
}

TEST(Optimize, StochasticAckleyDetectionNearOrigin) {
    const auto spec = benchmark_by_name("ackley");
    Algorithm1Config cfg;
    cfg.seed = seed_plan(0).circles;
    const auto run = build_surrogate(spec, NoiseModel{}, cfg);
    const auto res = optimize(run.surrogate, FlowConfig{}, Sense::kMin);
    ASSERT_EQ(res.status, OptimizeStatus::kFound);
    const auto& first = res.detections.front();
    EXPECT_LE(std::hypot(first.location[0], first.location[1]), 0.2);
}

TEST(Optimize, DeterministicCandidateLists) {
    const auto spec = benchmark_by_name("himmelblau");
    const auto run = build_dense_surrogate(spec, DenseFitConfig{});
    const auto a = optimize(run.surrogate, FlowConfig{}, Sense::kMin, spec.as_field());
    const auto b = optimize(run.surrogate, FlowConfig{}, Sense::kMin, spec.as_field());
    ASSERT_EQ(a.candidates.size(), b.candidates.size());
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        EXPECT_EQ(a.candidates[i].location, b.candidates[i].location);
        EXPECT_EQ(a.candidates[i].true_value, b.candidates[i].true_value);
    }
}

TEST(Optimize, NoCandidatesOnFlatObjective) {
    const auto res = optimize(constant_surrogate(1.0), small_grid(50), Sense::kMin);
    EXPECT_EQ(res.status, OptimizeStatus::kNoCandidates);
    EXPECT_THROW(res.best(), std::logic_error);
}

TEST(RefineHybrid, RastriginZoomRecoversOptimum) {
    const auto spec = benchmark_by_name("rastrigin");
    Candidate best;
    best.location = {0.0, 0.0};
    const RunConfig defaults;
    Algorithm1Config alg1 = defaults.algorithm1;
    alg1.points_per_circle = defaults.hybrid.points_per_circle;
    alg1.fit = defaults.hybrid.fit;
    alg1.seed = seed_plan(0).hybrid_circles;
    const auto h = refine_hybrid(spec, best, Domain({{-1, 1}, {-1, 1}}), 5, alg1, NoiseModel{}, FlowConfig{}, Sense::kMin);
    ASSERT_TRUE(h.surrogate_run.report.r_squared);
    EXPECT_GE(*h.surrogate_run.report.r_squared, 0.99);
    ASSERT_EQ(h.optimum.status, OptimizeStatus::kFound);
    EXPECT_LE(*h.optimum.best().true_value, 0.1);
}

TEST(RefineHybrid, FullDomainSameOrderMatchesOriginalRun) {
    const auto spec = benchmark_by_name("booth");
    Algorithm1Config alg1;
    alg1.seed = 3;
    const auto original = build_surrogate(spec, NoiseModel{}, alg1);
    const auto opt = optimize(original.surrogate, FlowConfig{}, Sense::kMin, spec.as_field());
    ASSERT_EQ(opt.status, OptimizeStatus::kFound);
    const auto h = refine_hybrid(spec, opt.best(), spec.domain(), alg1.order, alg1, NoiseModel{}, FlowConfig{}, Sense::kMin);
    EXPECT_NEAR(*h.surrogate_run.report.r_squared, *original.report.r_squared, 0.01);
    EXPECT_NEAR(h.surrogate_run.report.mae, original.report.mae, 0.1 * original.report.mae);
}

TEST(RefineHybrid, ZoomMustContainBest) {
    const auto spec = benchmark_by_name("rastrigin");
    Candidate best;
    best.location = {3.0, 3.0};
    EXPECT_THROW(refine_hybrid(spec, best, Domain({{-1, 1}, {-1, 1}}), 5, Algorithm1Config{}, NoiseModel{}, FlowConfig{},
                               Sense::kMin),
                 InvalidInput);
}

TEST(ZoomDomain, CentredAndClamped) {
    const Domain d({{-5, 5}, {-5, 5}});
    const std::array<double, 2> c{0.0, 0.0};
    const auto z = zoom_domain(d, c, 0.2);
    EXPECT_DOUBLE_EQ(z[0].lo, -1.0);
    EXPECT_DOUBLE_EQ(z[0].hi, 1.0);
    const std::array<double, 2> edge{4.9, -4.9};
    const auto ze = zoom_domain(d, edge, 0.2);
    EXPECT_GE(ze[0].lo, -5.0);
    EXPECT_LE(ze[0].hi, 5.0);
    EXPECT_TRUE(ze.contains(edge));
}

TEST(FlowConfig, Validation) {
    FlowConfig cfg;
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.nx = 2;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}
