#include "surroflow/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <queue>
#include <random>

namespace surroflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bilinear(const Grid2D& g, const GridAxis& x, const GridAxis& y, double px, double py) {
    const double fx = std::clamp((px - x.lo) / x.spacing(), 0.0, static_cast<double>(x.count - 1));
    const double fy = std::clamp((py - y.lo) / y.spacing(), 0.0, static_cast<double>(y.count - 1));
    const auto c0 = std::min(static_cast<std::size_t>(fx), x.count - 2);
    const auto r0 = std::min(static_cast<std::size_t>(fy), y.count - 2);
    const double tx = fx - static_cast<double>(c0);
    const double ty = fy - static_cast<double>(r0);
    return (1 - ty) * ((1 - tx) * g(r0, c0) + tx * g(r0, c0 + 1)) + ty * ((1 - tx) * g(r0 + 1, c0) + tx * g(r0 + 1, c0 + 1));
}

std::vector<Point> resample_polygon(const std::vector<Point>& poly, std::size_t count, double phase01) {
    const std::size_t m = poly.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % m];
        cum[i + 1] = cum[i] + std::hypot(b[0] - a[0], b[1] - a[1]);
    }
    const double total = cum[m];
    std::vector<Point> out;
    out.reserve(count);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double target = (phase01 + static_cast<double>(k)) * total / static_cast<double>(count);
        while (seg + 1 < m && cum[seg + 1] < target) ++seg;
        const auto& a = poly[seg];
        const auto& b = poly[(seg + 1) % m];
        const double len = cum[seg + 1] - cum[seg];
        const double t = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
    return out;
}

}  // namespace

double DistanceField::at(std::span<const double> p) const {
    require_dim(p, 2, "DistanceField::at");
    return bilinear(distance, x, y, p[0], p[1]);
}

double DistanceField::boundary_distance() const {
    double best = kInf;
    const std::size_t rows = distance.rows();
    const std::size_t cols = distance.cols();
    for (std::size_t c = 0; c < cols; ++c) best = std::min({best, distance(0, c), distance(rows - 1, c)});
    for (std::size_t r = 0; r < rows; ++r) best = std::min({best, distance(r, 0), distance(r, cols - 1)});
    return best;
}

std::vector<std::pair<int, int>> stencil_offsets(int radius) {
    if (radius < 1) throw InvalidInput("stencil radius must be >= 1");
    std::vector<std::pair<int, int>> out;
    for (int dj = -radius; dj <= radius; ++dj) {
        for (int di = -radius; di <= radius; ++di) {
            if (di == 0 && dj == 0) continue;
            if (std::gcd(std::abs(di), std::abs(dj)) != 1) continue;
            out.emplace_back(di, dj);
        }
    }
    return out;
}

double auto_height_scale(const FourierSurrogate& s, std::size_t resolution) {
    const auto& dom = s.domain();
    double width = 0.0;
    for (const auto& iv : dom.intervals()) width = std::max(width, iv.width());
    double lo = kInf;
    double hi = -kInf;
    if (s.dim() == 2) {
        const Grid2D g = s.evaluate_grid({dom[0].lo, dom[0].hi, resolution}, {dom[1].lo, dom[1].hi, resolution});
        lo = g.min();
        hi = g.max();
    } else {
        const std::size_t per = std::max<std::size_t>(2, std::min<std::size_t>(resolution, 9));
        std::size_t total = 1;
        for (std::size_t d = 0; d < s.dim(); ++d) total *= per;
        Point x(s.dim());
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (std::size_t d = 0; d < s.dim(); ++d) {
                x[d] = GridAxis{dom[d].lo, dom[d].hi, per}.coord(rem % per);
                rem /= per;
            }
            const double v = s.evaluate(x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const double range = hi - lo;
    if (!(range > 1e-12 * std::max(1.0, std::abs(hi)))) return 1.0;
    return width / range;
}

DistanceField shortest_path_field(const Grid2D& heights, const GridAxis& x, const GridAxis& y,
                                  std::span<const double> p, double height_scale, int stencil_radius) {
    require_dim(p, 2, "shortest_path_field");
    if (x.count < 2 || y.count < 2) throw InvalidInput("shortest_path_field: grid needs >= 2 nodes per axis");
    if (heights.rows() != y.count || heights.cols() != x.count) throw InvalidInput("shortest_path_field: shape mismatch");
    if (p[0] < x.lo || p[0] > x.hi || p[1] < y.lo || p[1] > y.hi) throw InvalidInput("source lies outside the grid");

    const std::size_t rows = y.count;
    const std::size_t cols = x.count;
    const double hx = x.spacing();
    const double hy = y.spacing();
    const double lam2 = height_scale * height_scale;
    const auto offsets = stencil_offsets(stencil_radius);

    DistanceField field{x, y, Grid2D(rows, cols, kInf), height_scale};
    auto& dist = field.distance;

    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    const double hp = bilinear(heights, x, y, p[0], p[1]);
    const auto c0 = std::min(static_cast<std::size_t>((p[0] - x.lo) / hx), cols - 2);
    const auto r0 = std::min(static_cast<std::size_t>((p[1] - y.lo) / hy), rows - 2);
    // Nodes within the stencil radius of the source cell start from their
    // straight-line distance; seeding only the cell corners would add a
    // constant detour of up to ~0.2 cells to every path.
    const auto reach = static_cast<long>(stencil_radius);
    const long r_lo = std::max(0L, static_cast<long>(r0) - reach);
    const long r_hi = std::min(static_cast<long>(rows) - 1, static_cast<long>(r0) + 1 + reach);
    const long c_lo = std::max(0L, static_cast<long>(c0) - reach);
    const long c_hi = std::min(static_cast<long>(cols) - 1, static_cast<long>(c0) + 1 + reach);
    for (long ri = r_lo; ri <= r_hi; ++ri) {
        for (long ci = c_lo; ci <= c_hi; ++ci) {
            const auto r = static_cast<std::size_t>(ri);
            const auto c = static_cast<std::size_t>(ci);
            const double ex = x.coord(c) - p[0];
            const double ey = y.coord(r) - p[1];
            const double ez = heights(r, c) - hp;
            const double d0 = std::sqrt(ex * ex + ey * ey + lam2 * ez * ez);
            if (d0 < dist(r, c)) {
                dist(r, c) = d0;
                heap.emplace(d0, r * cols + c);
            }
        }
    }

    std::vector<double> step_len2(offsets.size());
    for (std::size_t o = 0; o < offsets.size(); ++o) {
        const double dx = offsets[o].first * hx;
        const double dy = offsets[o].second * hy;
        step_len2[o] = dx * dx + dy * dy;
    }

    std::vector<char> done(rows * cols, 0);
    const auto* hv = heights.values().data();
    auto* dv = dist.values().data();
    while (!heap.empty()) {
        const auto [d, idx] = heap.top();
        heap.pop();
        if (done[idx]) continue;
        done[idx] = 1;
        const auto r = static_cast<long>(idx / cols);
        const auto c = static_cast<long>(idx % cols);
        for (std::size_t o = 0; o < offsets.size(); ++o) {
            const long nc = c + offsets[o].first;
            const long nr = r + offsets[o].second;
            if (nc < 0 || nr < 0 || nc >= static_cast<long>(cols) || nr >= static_cast<long>(rows)) continue;
            const std::size_t nidx = static_cast<std::size_t>(nr) * cols + static_cast<std::size_t>(nc);
            if (done[nidx]) continue;
            const double dz = hv[nidx] - hv[idx];
            const double nd = d + std::sqrt(step_len2[o] + lam2 * dz * dz);
            if (nd < dv[nidx]) {
                dv[nidx] = nd;
                heap.emplace(nd, nidx);
            }
        }
    }
    return field;
}

DistanceField geodesic_distance_field(const FourierSurrogate& s, std::span<const double> p,
                                      const GeodesicOptions& options) {
    if (s.dim() != 2) throw InvalidInput("geodesic distance fields require a two-dimensional surrogate");
    require_dim(p, 2, "geodesic_distance_field");
    if (!s.domain().contains(p, 1e-12)) throw InvalidInput("geodesic centre lies outside the surrogate domain");
    if (options.resolution < 3) throw InvalidInput("geodesic resolution must be >= 3");
    const auto& dom = s.domain();
    const GridAxis xa{dom[0].lo, dom[0].hi, options.resolution};
    const GridAxis ya{dom[1].lo, dom[1].hi, options.resolution};
    const Grid2D heights = s.evaluate_grid(xa, ya);
    double lam = options.height_scale;
    if (lam <= 0.0) {
        double width = std::max(dom[0].width(), dom[1].width());
        const double range = heights.max() - heights.min();
        lam = range > 1e-12 * std::max(1.0, std::abs(heights.max())) ? width / range : 1.0;
    }
    const Point pc = dom.clamp(p);
    return shortest_path_field(heights, xa, ya, pc, lam, options.stencil_radius);
}

GeodesicCircle circle_from_field(const DistanceField& field, std::span<const double> p, double r, std::size_t count,
                                 std::uint64_t seed, std::size_t rays) {
    require_dim(p, 2, "geodesic_circle");
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("geodesic circle radius must be > 0");
    if (count == 0) throw InvalidInput("geodesic circle needs at least one point");
    if (rays < 8) throw InvalidInput("geodesic circle needs at least 8 rays");

    GeodesicCircle out;
    out.radius = r;
    if (field.boundary_distance() <= r) {
        out.boundary_crossed = true;
        return out;
    }
    const double step = 0.5 * std::min(field.x.spacing(), field.y.spacing());
    const double xl = field.x.lo, xh = field.x.hi, yl = field.y.lo, yh = field.y.hi;
    std::vector<Point> poly;
    poly.reserve(rays);
    for (std::size_t k = 0; k < rays; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(rays);
        const double ux = std::cos(theta);
        const double uy = std::sin(theta);
        auto inside = [&](double t) {
            const double qx = p[0] + t * ux, qy = p[1] + t * uy;
            return qx >= xl && qx <= xh && qy >= yl && qy <= yh;
        };
        auto dist_at = [&](double t) { return bilinear(field.distance, field.x, field.y, p[0] + t * ux, p[1] + t * uy); };
        double lo = 0.0;
        double hi = step;
        while (inside(hi) && dist_at(hi) < r) {
            lo = hi;
            hi += step;
        }
        if (!inside(hi)) {
            // Clip the last step at the box edge; the level set is interior, so
            // the crossing lies before the exit point.
            double tmax = kInf;
            if (ux > 0) tmax = std::min(tmax, (xh - p[0]) / ux);
            if (ux < 0) tmax = std::min(tmax, (xl - p[0]) / ux);
            if (uy > 0) tmax = std::min(tmax, (yh - p[1]) / uy);
            if (uy < 0) tmax = std::min(tmax, (yl - p[1]) / uy);
            hi = std::max(lo, tmax);
        }
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (dist_at(mid) < r ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        poly.push_back({p[0] + t * ux, p[1] + t * uy});
    }
    std::mt19937_64 rng(seed);
    const double phase = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    out.points = resample_polygon(poly, count, phase);
    return out;
}

GeodesicCircle geodesic_circle(const FourierSurrogate& s, std::span<const double> p, double r, std::size_t count,
                               std::uint64_t seed, const GeodesicOptions& options) {
    require_dim(p, s.dim(), "geodesic_circle");
    if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("geodesic circle radius must be > 0");
    if (count == 0) throw InvalidInput("geodesic circle needs at least one point");
    if (!s.domain().contains(p, 1e-12)) throw InvalidInput("geodesic centre lies outside the surrogate domain");
    if (s.dim() == 2) {
        const DistanceField field = geodesic_distance_field(s, p, options);
        return circle_from_field(field, p, r, count, seed, options.rays);
    }

    const double lam = options.height_scale > 0.0 ? options.height_scale : auto_height_scale(s, options.resolution);
    const auto grad = s.gradient(p);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    GeodesicCircle out;
    out.radius = r;
    for (std::size_t i = 0; i < count; ++i) {
        Point u(s.dim());
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : u) {
                v = gauss(rng);
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        double slope = 0.0;
        for (std::size_t d = 0; d < u.size(); ++d) {
            u[d] /= norm;
            slope += grad[d] * u[d];
        }
        const double rho = r / std::sqrt(1.0 + lam * lam * slope * slope);
        Point q(s.dim());
        for (std::size_t d = 0; d < q.size(); ++d) q[d] = p[d] + rho * u[d];
        if (!s.domain().contains(q)) {
            out.points.clear();
            out.boundary_crossed = true;
            return out;
        }
        out.points.push_back(std::move(q));
    }
    return out;
}

}  // namespace surroflow
