#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "surroflow/algorithm1.hpp"
#include "surroflow/geodesic.hpp"
#include "surroflow/run_config.hpp"

using namespace surroflow;

namespace {

Domain square(double h) { return Domain({{-h, h}, {-h, h}}); }

FourierSurrogate wavy_surface() {
    FourierSurrogate s(2, square(2.0), 2.0);
    const std::array<int, 2> k10{1, 0}, km10{-1, 0}, k01{0, 1}, k0m1{0, -1}, k11{1, 1}, km1m1{-1, -1};
    s.coefficient(k10) = {0.4, 0.1};
    s.coefficient(km10) = {0.4, -0.1};
    s.coefficient(k01) = {-0.3, 0.2};
    s.coefficient(k0m1) = {-0.3, -0.2};
    s.coefficient(k11) = {0.15, 0.0};
    s.coefficient(km1m1) = {0.15, 0.0};
    return s;
}

// Independent shortest-path oracle: Dijkstra on a (res x res) grid over a
// stencil of all coprime offsets up to 8 cells with chord edge lengths sqrt(dx^2 + dy^2 + (lambda dF)^2).
struct OracleField {
    GridAxis x, y;
    std::vector<double> dist;
    double at(double px, double py) const {
        const double fx = (px - x.lo) / x.spacing();
        const double fy = (py - y.lo) / y.spacing();
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(fx), x.count - 2);
        const auto j = std::min<std::size_t>(static_cast<std::size_t>(fy), y.count - 2);
        const double tx = fx - static_cast<double>(i);
        const double ty = fy - static_cast<double>(j);
        auto d = [&](std::size_t a, std::size_t b) { return dist[b * x.count + a]; };
        return (1 - tx) * (1 - ty) * d(i, j) + tx * (1 - ty) * d(i + 1, j) + (1 - tx) * ty * d(i, j + 1) +
               tx * ty * d(i + 1, j + 1);
    }
};

OracleField oracle_distances(const FourierSurrogate& s, double lambda, std::size_t res) {
    const auto& dom = s.domain();
    OracleField f{{dom[0].lo, dom[0].hi, res}, {dom[1].lo, dom[1].hi, res}, {}};
    std::vector<double> h(res * res);
    for (std::size_t j = 0; j < res; ++j)
        for (std::size_t i = 0; i < res; ++i) h[j * res + i] = s(std::array<double, 2>{f.x.coord(i), f.y.coord(j)});
    std::vector<std::pair<int, int>> stencil;
    for (int a = -8; a <= 8; ++a)
        for (int b = -8; b <= 8; ++b)
            if ((a || b) && std::gcd(std::abs(a), std::abs(b)) == 1) stencil.emplace_back(a, b);
    f.dist.assign(res * res, std::numeric_limits<double>::infinity());
    const std::size_t src = (res / 2) * res + res / 2;
    f.dist[src] = 0.0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    pq.emplace(0.0, src);
    const double dx = f.x.spacing();
    const double dy = f.y.spacing();
    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (d > f.dist[v]) continue;
        const int vi = static_cast<int>(v % res);
        const int vj = static_cast<int>(v / res);
        for (const auto& [a, b] : stencil) {
            const int ni = vi + a;
            const int nj = vj + b;
            if (ni < 0 || nj < 0 || ni >= static_cast<int>(res) || nj >= static_cast<int>(res)) continue;
            const std::size_t w = static_cast<std::size_t>(nj) * res + static_cast<std::size_t>(ni);
            const double dh = lambda * (h[w] - h[v]);
            const double len = std::sqrt(a * a * dx * dx + b * b * dy * dy + dh * dh);
            if (d + len < f.dist[w]) {
                f.dist[w] = d + len;
                pq.emplace(f.dist[w], w);
            }
        }
    }
    return f;
}

}  // namespace

TEST(CornerSamples, CountsAndLocations) {
    const auto oracle = [](std::span<const double> x) { return x[0]; };
    const auto c2 = corner_samples(square(2.0), oracle);
    ASSERT_EQ(c2.size(), 4u);
    for (const auto& s : c2) {
        EXPECT_EQ(std::abs(s.location[0]), 2.0);
        EXPECT_EQ(std::abs(s.location[1]), 2.0);
        EXPECT_EQ(s.value, s.location[0]);
        EXPECT_TRUE(std::holds_alternative<BoundaryTag>(s.provenance));
    }
    EXPECT_EQ(corner_samples(Domain({{0, 1}, {0, 1}, {0, 1}}), oracle).size(), 8u);
    const auto c1 = corner_samples(Domain({{0, 1}}), oracle);
    ASSERT_EQ(c1.size(), 2u);
    EXPECT_EQ(c1[0].location[0] + c1[1].location[0], 1.0);
}

TEST(MidpointSample, Arithmetic) {
    const auto oracle = [](std::span<const double>) { return 0.0; };
    const auto a = midpoint_sample(Domain({{-5.12, 5.12}, {-5.12, 5.12}}), oracle);
    EXPECT_EQ(a.location, (Point{0.0, 0.0}));
    const auto b = midpoint_sample(Domain({{0, 4}, {2, 6}}), oracle);
    EXPECT_EQ(b.location, (Point{2.0, 4.0}));
    EXPECT_EQ(midpoint_sample(square(2.0), oracle).location, (Point{0.0, 0.0}));
}

TEST(AcceptSample, ToleranceRule) {
    EXPECT_EQ(accept_sample(1.05, 1.0, 0.1), Acceptance::kReject);
    EXPECT_EQ(accept_sample(1.5, 1.0, 0.1), Acceptance::kAccept);
    EXPECT_EQ(accept_sample(0.75, 0.5, 0.25), Acceptance::kReject);  // |f-F| == alpha exactly
    EXPECT_THROW(accept_sample(1.0, 1.0, 0.0), InvalidInput);
}

TEST(GeodesicCircle, FlatSurfaceGivesEuclideanCircle) {
    FourierSurrogate flat(2, square(2.0), 2.0);
    const std::array<int, 2> zero{0, 0};
    flat.coefficient(zero) = 3.0;
    const std::array<double, 2> p{0.0, 0.0};
    const auto c = geodesic_circle(flat, p, 1.0, 24, 1);
    EXPECT_FALSE(c.boundary_crossed);
    ASSERT_EQ(c.points.size(), 24u);
    // Same relative tolerance as the shortest-path check below; the residual is
    // the direction bias of the finite stencil (about 0.5% near the axes).
    for (const auto& q : c.points) EXPECT_NEAR(std::hypot(q[0], q[1]), 1.0, 1e-2);
}

TEST(GeodesicCircle, FlatSurfaceSignalsBoundaryCrossing) {
    FourierSurrogate flat(2, square(2.0), 2.0);
    const std::array<double, 2> p{0.0, 0.0};
    const auto c = geodesic_circle(flat, p, 2.5, 16, 1);
    EXPECT_TRUE(c.boundary_crossed);
}

TEST(GeodesicCircle, PointsLieAtRequestedShortestPathDistance) {
    const auto s = wavy_surface();
    const std::array<double, 2> p{0.0, 0.0};
    GeodesicOptions opt;
    opt.height_scale = 1.0;
    const auto oracle = oracle_distances(s, 1.0, 401);
    for (double r : {0.5, 1.0, 1.4}) {
        const auto c = geodesic_circle(s, p, r, 32, 7, opt);
        ASSERT_FALSE(c.boundary_crossed) << r;
        ASSERT_EQ(c.points.size(), 32u);
        for (const auto& q : c.points) {
            EXPECT_TRUE(s.domain().contains(q));
            EXPECT_LE(std::abs(oracle.at(q[0], q[1]) - r), 1e-2 * r) << "r=" << r;
        }
    }
}

TEST(GeodesicCircle, SameSeedSamePoints) {
    const auto s = wavy_surface();
    const std::array<double, 2> p{0.0, 0.0};
    const auto a = geodesic_circle(s, p, 1.0, 10, 3);
    const auto b = geodesic_circle(s, p, 1.0, 10, 3);
    EXPECT_EQ(a.points, b.points);
}

TEST(GeodesicCircle, RejectsNonPositiveRadius) {
    const auto s = wavy_surface();
    const std::array<double, 2> p{0.0, 0.0};
    EXPECT_THROW(geodesic_circle(s, p, 0.0, 10, 3), InvalidInput);
}

TEST(BuildSurrogate, SampleInvariantsAndAcceptanceRule) {
    const auto spec = benchmark_by_name("himmelblau");
    Algorithm1Config cfg;
    cfg.seed = 11;
    const auto res = build_surrogate(spec, NoiseModel{}, cfg);
    ASSERT_GE(res.samples.size(), 5u);
    // Corners first, then the midpoint.
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(std::holds_alternative<BoundaryTag>(res.samples[i].provenance));
    EXPECT_TRUE(std::holds_alternative<MidpointTag>(res.samples[4].provenance));
    std::size_t last = 0;
    for (const auto& s : res.samples) {
        EXPECT_TRUE(spec.domain().contains(s.location));
        if (const auto* c = std::get_if<CircleTag>(&s.provenance)) {
            EXPECT_GE(c->iteration, last);
            last = c->iteration;
        }
    }
    std::size_t accepted = 0;
    for (const auto& t : res.trace) {
        if (t.iteration == 0) {  // corner and midpoint seeds are always kept
            EXPECT_TRUE(t.accepted);
            ++accepted;
            continue;
        }
        if (t.accepted) {
            ++accepted;
            EXPECT_GT(std::abs(t.true_value - t.surrogate_value), cfg.alpha);
        } else {
            EXPECT_LE(std::abs(t.true_value - t.surrogate_value), cfg.alpha);
        }
    }
    EXPECT_EQ(accepted, res.samples.size());
    EXPECT_TRUE(res.boundary_reached);
}

TEST(BuildSurrogate, InitialSampleCountIsCornersPlusMidpoint) {
    const auto spec = benchmark_by_name("booth");
    Algorithm1Config cfg;
    cfg.max_iterations = 1;
    const auto res = build_surrogate(spec, NoiseModel{}, cfg);
    std::size_t seeds = 0;
    for (const auto& s : res.samples) seeds += std::holds_alternative<CircleTag>(s.provenance) ? 0 : 1;
    EXPECT_EQ(seeds, 5u);
}

TEST(BuildSurrogate, BoothReachesHighRSquared) {
    const auto res = build_surrogate(benchmark_by_name("booth"), NoiseModel{}, Algorithm1Config{});
    ASSERT_TRUE(res.report.r_squared);
    EXPECT_GE(*res.report.r_squared, 0.95);
}

TEST(BuildSurrogate, RastriginStaysInWideBand) {
    // Pinned seed; across seeds the value ranges over roughly 0.05-0.49.
    Algorithm1Config cfg;
    cfg.seed = seed_plan(0).circles;  // the circle stream of master seed 0
    const auto res = build_surrogate(benchmark_by_name("rastrigin"), NoiseModel{}, cfg);
    ASSERT_TRUE(res.report.r_squared);
    EXPECT_GE(*res.report.r_squared, 0.2);
    EXPECT_LE(*res.report.r_squared, 0.8);
}

TEST(BuildSurrogate, DeterministicForFixedSeed) {
    const auto spec = benchmark_by_name("ackley");
    Algorithm1Config cfg;
    cfg.seed = 5;
    const NoiseModel noise{NoiseKind::kAdditiveGaussian, 0.05, 9};
    const auto a = build_surrogate(spec, noise, cfg);
    const auto b = build_surrogate(spec, noise, cfg);
    EXPECT_TRUE(a.samples == b.samples);
    EXPECT_EQ(a.surrogate.coefficients(), b.surrogate.coefficients());
}

TEST(BuildSurrogate, ConfigValidation) {
    Algorithm1Config cfg;
    cfg.alpha = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
    cfg = {};
    cfg.points_per_circle = 0;
    EXPECT_THROW(cfg.validate(), InvalidInput);
}
