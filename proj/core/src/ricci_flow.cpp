#include "surroflow/ricci_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

namespace surroflow {

namespace {

/// Second difference along one axis at index i of n nodes with spacing^2 h2.
/// Interior: centred 3-point. Edges: second-order one-sided 4-point stencil
/// (falls back to the first-order 3-point stencil when only 3 nodes exist).
template <typename At>
double second_difference(At at, std::size_t i, std::size_t n, double h2) {
    if (i > 0 && i + 1 < n) return (at(i - 1) - 2.0 * at(i) + at(i + 1)) / h2;
    if (n >= 4) {
        if (i == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
        return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
    }
    if (i == 0) return (at(0) - 2.0 * at(1) + at(2)) / h2;
    return (at(n - 1) - 2.0 * at(n - 2) + at(n - 3)) / h2;
}

double laplacian_at(const Grid2D& u, std::size_t r, std::size_t c, double hx2, double hy2) {
    const double dxx = second_difference([&](std::size_t i) { return u(r, i); }, c, u.cols(), hx2);
    const double dyy = second_difference([&](std::size_t i) { return u(i, c); }, r, u.rows(), hy2);
    return dxx + dyy;
}

double curvature_at(const Grid2D& u, std::size_t r, std::size_t c, double hx2, double hy2) {
    const double lap = laplacian_at(u, r, c, hx2, hy2);
    if (lap == 0.0) return 0.0;
    return -std::exp(-2.0 * u(r, c)) * lap;
}

void check_grid(const MetricField& m) {
    if (m.u.rows() < 3 || m.u.cols() < 3) throw InvalidInput("metric grid must be at least 3x3");
    if (m.u.rows() != m.y.count || m.u.cols() != m.x.count) throw InvalidInput("metric grid shape does not match its axes");
}

bool is_frozen(std::span<const std::uint8_t> mask, std::size_t idx) { return !mask.empty() && mask[idx] != 0; }

struct Objective {
    ScalarField f;
    std::function<std::vector<double>(std::span<const double>)> grad;
    std::function<std::vector<double>(std::span<const double>)> hess;
};

Objective finite_difference_objective(const ScalarField& f, const Domain& dom) {
    const double step = 1e-4 * dom.min_width();
    Objective o;
    o.f = f;
    o.grad = [f, step](std::span<const double> x) {
        std::vector<double> g(2);
        for (std::size_t d = 0; d < 2; ++d) {
            Point a(x.begin(), x.end()), b(x.begin(), x.end());
            a[d] += step;
            b[d] -= step;
            g[d] = (f(a) - f(b)) / (2.0 * step);
        }
        return g;
    };
    o.hess = [f, step](std::span<const double> x) {
        std::vector<double> h(4);
        const double f0 = f(x);
        for (std::size_t d = 0; d < 2; ++d) {
            Point a(x.begin(), x.end()), b(x.begin(), x.end());
            a[d] += step;
            b[d] -= step;
            h[d * 3] = (f(a) - 2.0 * f0 + f(b)) / (step * step);
        }
        Point pp(x.begin(), x.end()), pm = pp, mp = pp, mm = pp;
        pp[0] += step; pp[1] += step;
        pm[0] += step; pm[1] -= step;
        mp[0] -= step; mp[1] += step;
        mm[0] -= step; mm[1] -= step;
        h[1] = h[2] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * step * step);
        return h;
    };
    return o;
}

bool better(double a, double b, Sense sense) { return sense == Sense::kMin ? a < b : a > b; }

/// One Newton step towards the nearby stationary point of the objective,
/// restricted to the candidate's grid cell and accepted only if it improves.
void refine_in_cell(Candidate& c, const Objective& obj, const MetricField& m, const Domain& dom) {
    const auto g = obj.grad(c.location);
    const auto h = obj.hess(c.location);
    const double det = h[0] * h[3] - h[1] * h[2];
    const bool definite = det > 0.0 && (c.sense == Sense::kMin ? h[0] > 0.0 : h[0] < 0.0);
    if (!definite) return;
    const double dx = -(h[3] * g[0] - h[1] * g[1]) / det;
    const double dy = -(-h[2] * g[0] + h[0] * g[1]) / det;
    const double hx = 0.5 * m.x.spacing();
    const double hy = 0.5 * m.y.spacing();
    Point q{c.location[0] + std::clamp(dx, -hx, hx), c.location[1] + std::clamp(dy, -hy, hy)};
    q = dom.clamp(q);
    const double fq = obj.f(q);
    if (std::isfinite(fq) && better(fq, c.surrogate_value, c.sense)) {
        c.location = std::move(q);
        c.surrogate_value = fq;
    }
}

OptimizeResult run_flow(MetricField m, const Objective& obj, const Domain& dom, const FlowConfig& cfg, Sense sense,
                        const ScalarField& oracle, const SnapshotSink& sink) {
    const std::size_t rows = m.u.rows();
    const std::size_t cols = m.u.cols();
    const double hx2 = m.x.spacing() * m.x.spacing();
    const double hy2 = m.y.spacing() * m.y.spacing();
    const double forward_stable = 0.5 / (2.0 / hx2 + 2.0 / hy2);  // times exp(2u)

    OptimizeResult res;
    std::vector<std::uint8_t> frozen(rows * cols, 0);
    std::vector<std::size_t> frozen_cells;
    std::optional<Grid2D> prev_k;

    auto freeze_disk = [&](std::size_t r0, std::size_t c0) {
        const long rad = cfg.freeze_radius;
        for (long dr = -rad; dr <= rad; ++dr) {
            for (long dc = -rad; dc <= rad; ++dc) {
                if (dr * dr + dc * dc > rad * rad) continue;
                const long r = static_cast<long>(r0) + dr;
                const long c = static_cast<long>(c0) + dc;
                if (r < 0 || c < 0 || r >= static_cast<long>(rows) || c >= static_cast<long>(cols)) continue;
                const std::size_t idx = static_cast<std::size_t>(r) * cols + static_cast<std::size_t>(c);
                if (!frozen[idx]) {
                    frozen[idx] = 1;
                    frozen_cells.push_back(idx);
                }
            }
        }
    };

    CurvatureField k;
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        k = gaussian_curvature(m);
        res.iterations = it;

        double peak = 0.0;
        for (std::size_t i = 0; i < k.k.size(); ++i) {
            if (!frozen[i]) peak = std::max(peak, std::abs(k.k.values()[i]));
        }
        res.peak_curvature_trace.push_back(peak);

        auto found = detect_singularities(k, m, cfg, frozen);
        for (auto& cand : found) {
            if (res.detections.size() >= cfg.max_candidates) break;
            cand.iteration = it;
            freeze_disk(cand.row, cand.col);
            res.detections.push_back(std::move(cand));
        }
        if (sink && cfg.plot_interval > 0 && it % cfg.plot_interval == 0) sink(it, m, k);
        if (res.detections.size() >= cfg.max_candidates) break;

        if (prev_k) {
            double change = 0.0;
            for (std::size_t i = 0; i < k.k.size(); ++i) {
                change = std::max(change, std::abs(k.k.values()[i] - prev_k->values()[i]));
            }
            if (change < cfg.convergence_threshold) {
                res.converged = true;
                break;
            }
        }
        prev_k = k.k;

        // Inverse flow on active cells; split dt if the guard would be violated.
        {
            int halvings = 0;
            while (halvings < 10 && cfg.dt / std::ldexp(1.0, halvings) * peak >= 1.0) ++halvings;
            const std::size_t substeps = std::size_t{1} << halvings;
            const double step = cfg.dt / static_cast<double>(substeps);
            Grid2D kc = k.k;
            for (std::size_t s = 0; s < substeps; ++s) {
                if (s > 0) {
                    kc = gaussian_curvature(m).k;
                    double sub_peak = 0.0;
                    for (std::size_t i = 0; i < kc.size(); ++i) {
                        if (!frozen[i]) sub_peak = std::max(sub_peak, std::abs(kc.values()[i]));
                    }
                    if (step * sub_peak >= 1.0) break;  // blow-up: detected next iteration
                }
                if (step * peak >= 1.0 && s == 0) break;
                auto uv = m.u.values();
                for (std::size_t i = 0; i < uv.size(); ++i) {
                    if (!frozen[i]) uv[i] += step * kc.values()[i];
                }
            }
        }

        // Forward flow on frozen cells, sub-stepped under the explicit diffusion limit.
        if (!frozen_cells.empty()) {
            double min_u = std::numeric_limits<double>::infinity();
            for (auto idx : frozen_cells) min_u = std::min(min_u, m.u.values()[idx]);
            const double stable = forward_stable * std::exp(2.0 * min_u);
            std::size_t substeps = 1;
            if (stable < cfg.dt) {
                substeps = std::min<std::size_t>(cfg.max_forward_substeps,
                                                 static_cast<std::size_t>(std::ceil(cfg.dt / stable)));
            }
            const double step = std::min(cfg.dt / static_cast<double>(substeps), stable);
            std::vector<double> kf(frozen_cells.size());
            for (std::size_t s = 0; s < substeps; ++s) {
                for (std::size_t j = 0; j < frozen_cells.size(); ++j) {
                    const std::size_t idx = frozen_cells[j];
                    kf[j] = curvature_at(m.u, idx / cols, idx % cols, hx2, hy2);
                }
                auto uv = m.u.values();
                for (std::size_t j = 0; j < frozen_cells.size(); ++j) uv[frozen_cells[j]] -= step * kf[j];
            }
        }
        m.t += cfg.dt;
        for (double v : m.u.values()) {
            if (!std::isfinite(v)) throw InvalidInput("flow produced a non-finite metric");
        }
    }
    res.final_time = m.t;
    if (sink) sink(res.iterations, m, gaussian_curvature(m));

    for (const auto& det : res.detections) {
        if (m.normalised(det.row, det.col) > cfg.filter_level) continue;
        Candidate c = det;
        if (cfg.subcell_refine) refine_in_cell(c, obj, m, dom);
        if (oracle) c.true_value = oracle(c.location);
        res.candidates.push_back(std::move(c));
    }
    std::vector<std::size_t> order(res.candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = res.candidates[a];
        const auto& cb = res.candidates[b];
        const double va = ca.true_value.value_or(ca.surrogate_value);
        const double vb = cb.true_value.value_or(cb.surrogate_value);
        if (va != vb) return better(va, vb, sense);
        return ca.iteration < cb.iteration;
    });
    std::vector<Candidate> ranked;
    ranked.reserve(order.size());
    for (auto i : order) ranked.push_back(res.candidates[i]);
    res.candidates = std::move(ranked);
    res.status = res.candidates.empty() ? OptimizeStatus::kNoCandidates : OptimizeStatus::kFound;
    return res;
}

}  // namespace

void FlowConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("flow.dt must be > 0");
    if (iterations == 0) throw InvalidInput("flow.iterations must be >= 1");
    if (nx < 3 || ny < 3) throw InvalidInput("flow.resolution must be at least 3x3");
    if (!(convergence_threshold >= 0.0)) throw InvalidInput("flow.convergence_threshold must be >= 0");
    if (!(blowup_threshold > 0.0)) throw InvalidInput("flow.blowup_threshold must be > 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("flow.beta must be finite and >= 0");
    if (!(initial_curvature_fraction > 0.0)) throw InvalidInput("flow.initial_curvature_fraction must be > 0");
    if (freeze_radius < 0) throw InvalidInput("flow.freeze_radius must be >= 0");
    if (max_candidates == 0) throw InvalidInput("flow.max_candidates must be >= 1");
    if (!(filter_level >= 0.0 && filter_level <= 1.0)) throw InvalidInput("flow.filter_level must lie in [0, 1]");
    if (max_forward_substeps == 0) throw InvalidInput("flow.max_forward_substeps must be >= 1");
}

double MetricField::normalised(std::size_t r, std::size_t c) const {
    const double range = objective_max - objective_min;
    if (!(range > 0.0)) return 0.0;
    const double f = objective(r, c);
    return sense == Sense::kMin ? (f - objective_min) / range : (objective_max - f) / range;
}

MetricField init_metric(const FourierSurrogate& s, const FlowConfig& cfg, Sense sense) {
    if (s.dim() != 2) throw InvalidInput("the flow engine supports two-dimensional surrogates only");
    const auto& dom = s.domain();
    const GridAxis x{dom[0].lo, dom[0].hi, cfg.nx};
    const GridAxis y{dom[1].lo, dom[1].hi, cfg.ny};
    return init_metric(s.evaluate_grid(x, y), x, y, cfg, sense);
}

MetricField init_metric(Grid2D objective, const GridAxis& x, const GridAxis& y, const FlowConfig& cfg, Sense sense) {
    cfg.validate();
    if (objective.rows() != y.count || objective.cols() != x.count) throw InvalidInput("objective grid shape mismatch");
    MetricField m;
    m.x = x;
    m.y = y;
    m.beta = cfg.beta;
    m.sense = sense;
    m.objective_min = objective.min();
    m.objective_max = objective.max();
    m.objective = std::move(objective);
    if (!std::isfinite(m.objective_min) || !std::isfinite(m.objective_max)) throw InvalidInput("objective is not finite");
    m.u = Grid2D(y.count, x.count);
    auto uv = m.u.values();
    for (std::size_t r = 0; r < y.count; ++r) {
        for (std::size_t c = 0; c < x.count; ++c) uv[r * x.count + c] = 0.5 * cfg.beta * m.normalised(r, c);
    }
    check_grid(m);

    // Metric scale: choose c so that max |K| = fraction * threshold at t = 0.
    // log|K| = -2u + log|Lap u| is evaluated in log space to avoid underflow.
    const double hx2 = x.spacing() * x.spacing();
    const double hy2 = y.spacing() * y.spacing();
    double log_peak = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < y.count; ++r) {
        for (std::size_t c = 0; c < x.count; ++c) {
            const double lap = laplacian_at(m.u, r, c, hx2, hy2);
            if (lap == 0.0) continue;
            log_peak = std::max(log_peak, -2.0 * m.u(r, c) + std::log(std::abs(lap)));
        }
    }
    if (std::isfinite(log_peak)) {
        m.scale_offset = 0.5 * (log_peak - std::log(cfg.initial_curvature_fraction * cfg.blowup_threshold));
        for (auto& v : uv) v += m.scale_offset;
    }
    return m;
}

CurvatureField gaussian_curvature(const MetricField& m) {
    check_grid(m);
    const double hx2 = m.x.spacing() * m.x.spacing();
    const double hy2 = m.y.spacing() * m.y.spacing();
    CurvatureField k{m.x, m.y, Grid2D(m.u.rows(), m.u.cols())};
    for (std::size_t r = 0; r < m.u.rows(); ++r) {
        for (std::size_t c = 0; c < m.u.cols(); ++c) k.k(r, c) = curvature_at(m.u, r, c, hx2, hy2);
    }
    return k;
}

MetricField flow_step(const MetricField& m, const FlowConfig& cfg, FlowDirection direction,
                      std::span<const std::uint8_t> frozen) {
    if (!(cfg.dt > 0.0)) throw InvalidInput("flow.dt must be > 0");
    if (!frozen.empty() && frozen.size() != m.u.size()) throw InvalidInput("frozen mask shape mismatch");
    const CurvatureField k = gaussian_curvature(m);
    double peak = 0.0;
    for (std::size_t i = 0; i < k.k.size(); ++i) {
        if (!is_frozen(frozen, i)) peak = std::max(peak, std::abs(k.k.values()[i]));
    }
    if (!(cfg.dt * peak < 1.0)) {
        throw UnstableStep("flow step violates dt * max|K| < 1 (dt * max|K| = " + std::to_string(cfg.dt * peak) + ")",
                           cfg.dt * peak);
    }
    MetricField out = m;
    const double sign = direction == FlowDirection::kInverse ? 1.0 : -1.0;
    auto uv = out.u.values();
    for (std::size_t i = 0; i < uv.size(); ++i) {
        if (is_frozen(frozen, i)) continue;
        uv[i] += sign * cfg.dt * k.k.values()[i];
        if (!std::isfinite(uv[i])) throw InvalidInput("flow step produced a non-finite metric");
    }
    out.t += cfg.dt;
    return out;
}

std::vector<Candidate> detect_singularities(const CurvatureField& k, const MetricField& m, const FlowConfig& cfg,
                                            std::span<const std::uint8_t> exclude) {
    const std::size_t rows = k.k.rows();
    const std::size_t cols = k.k.cols();
    if (rows != m.u.rows() || cols != m.u.cols()) throw InvalidInput("curvature and metric shapes differ");
    if (!exclude.empty() && exclude.size() != rows * cols) throw InvalidInput("exclusion mask shape mismatch");

    struct Peak {
        double value;
        std::size_t r, c;
    };
    std::vector<Peak> peaks;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (is_frozen(exclude, r * cols + c)) continue;
            const double v = std::abs(k.k(r, c));
            if (!(v >= cfg.blowup_threshold)) continue;
            bool ge_all = true;
            bool gt_one = false;
            for (long dr = -1; dr <= 1 && ge_all; ++dr) {
                for (long dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) continue;
                    const long rr = static_cast<long>(r) + dr;
                    const long cc = static_cast<long>(c) + dc;
                    if (rr < 0 || cc < 0 || rr >= static_cast<long>(rows) || cc >= static_cast<long>(cols)) continue;
                    const double nv = std::abs(k.k(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc)));
                    if (nv > v) {
                        ge_all = false;
                        break;
                    }
                    if (nv < v) gt_one = true;
                }
            }
            if (ge_all && gt_one) peaks.push_back({v, r, c});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.value > b.value; });

    std::vector<Candidate> out;
    const long rad2 = static_cast<long>(cfg.freeze_radius) * cfg.freeze_radius;
    for (const auto& p : peaks) {
        bool suppressed = false;
        for (const auto& c : out) {
            const long dr = static_cast<long>(p.r) - static_cast<long>(c.row);
            const long dc = static_cast<long>(p.c) - static_cast<long>(c.col);
            if (dr * dr + dc * dc <= rad2) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) continue;
        Candidate c;
        c.location = {m.x.coord(p.c), m.y.coord(p.r)};
        c.surrogate_value = m.objective(p.r, p.c);
        c.peak_curvature = p.value;
        c.sense = m.sense;
        c.row = p.r;
        c.col = p.c;
        out.push_back(std::move(c));
    }
    return out;
}

const Candidate& OptimizeResult::best() const {
    if (candidates.empty()) throw std::logic_error("optimisation produced no candidates");
    return candidates.front();
}

OptimizeResult optimize(const FourierSurrogate& s, const FlowConfig& cfg, Sense sense, const ScalarField& oracle,
                        const SnapshotSink& sink) {
    MetricField m = init_metric(s, cfg, sense);
    Objective obj;
    obj.f = s.as_field();
    obj.grad = [&s](std::span<const double> x) { return s.gradient(x); };
    obj.hess = [&s](std::span<const double> x) { return s.hessian(x); };
    return run_flow(std::move(m), obj, s.domain(), cfg, sense, oracle, sink);
}

OptimizeResult optimize(const ScalarField& objective, const Domain& domain, const FlowConfig& cfg, Sense sense,
                        const ScalarField& oracle, const SnapshotSink& sink) {
    if (domain.dim() != 2) throw InvalidInput("the flow engine supports two-dimensional domains only");
    if (!objective) throw InvalidInput("objective function is empty");
    cfg.validate();
    const GridAxis x{domain[0].lo, domain[0].hi, cfg.nx};
    const GridAxis y{domain[1].lo, domain[1].hi, cfg.ny};
    Grid2D values(cfg.ny, cfg.nx);
    for (std::size_t r = 0; r < cfg.ny; ++r) {
        for (std::size_t c = 0; c < cfg.nx; ++c) {
            const double p[2] = {x.coord(c), y.coord(r)};
            values(r, c) = objective(p);
        }
    }
    MetricField m = init_metric(std::move(values), x, y, cfg, sense);
    return run_flow(std::move(m), finite_difference_objective(objective, domain), domain, cfg, sense, oracle, sink);
}

Domain zoom_domain(const Domain& domain, std::span<const double> centre, double shrink) {
    require_dim(centre, domain.dim(), "zoom_domain");
    if (!(shrink > 0.0 && shrink <= 1.0)) throw InvalidInput("zoom shrink factor must lie in (0, 1]");
    std::vector<Interval> out;
    for (std::size_t d = 0; d < domain.dim(); ++d) {
        const auto& iv = domain[d];
        const double half = 0.5 * shrink * iv.width();
        double lo = centre[d] - half;
        double hi = centre[d] + half;
        if (lo < iv.lo) {
            hi += iv.lo - lo;
            lo = iv.lo;
        }
        if (hi > iv.hi) {
            lo -= hi - iv.hi;
            hi = iv.hi;
        }
        out.push_back({std::max(lo, iv.lo), std::min(hi, iv.hi)});
    }
    return Domain(std::move(out));
}

HybridResult refine_hybrid(const BenchmarkSpec& spec, const Candidate& best, const Domain& zoom, std::size_t order,
                           const Algorithm1Config& alg1, const NoiseModel& noise, const FlowConfig& flow, Sense sense) {
    if (!zoom.contains(best.location, 1e-12)) throw InvalidInput("zoom domain must contain the current best candidate");
    const BenchmarkSpec zoomed = spec.with_domain(zoom);
    Algorithm1Config cfg = alg1;
    cfg.order = order;
    HybridResult out{build_surrogate(zoomed, noise, cfg), {}, zoom};
    NoiseModel rank_noise = noise;
    rank_noise.seed = derive_seed(noise.seed, 7);
    auto ranker = std::make_shared<NoisyOracle>(zoomed, rank_noise);
    const ScalarField oracle = [ranker](std::span<const double> x) { return (*ranker)(x); };
    out.optimum = optimize(out.surrogate_run.surrogate, flow, sense, oracle);
    return out;
}

}  // namespace surroflow
