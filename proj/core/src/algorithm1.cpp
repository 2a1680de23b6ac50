#include "surroflow/algorithm1.hpp"

#include <cmath>
#include <optional>

namespace surroflow {

SampleSet corner_samples(const Domain& domain, const ScalarField& oracle) {
    if (domain.dim() == 0) throw InvalidInput("corner_samples: empty domain");
    SampleSet out;
    for (auto& c : domain.corners()) {
        const double v = oracle(c);
        out.add({std::move(c), v, BoundaryTag{}});
    }
    return out;
}

Sample midpoint_sample(const Domain& domain, const ScalarField& oracle) {
    if (domain.dim() == 0) throw InvalidInput("midpoint_sample: empty domain");
    Point p = domain.midpoint();
    const double v = oracle(p);
    return {std::move(p), v, MidpointTag{}};
}

Acceptance accept_sample(double true_value, double surrogate_value, double alpha) {
    if (!(alpha > 0.0)) throw InvalidInput("alpha must be > 0");
    return std::abs(true_value - surrogate_value) <= alpha ? Acceptance::kReject : Acceptance::kAccept;
}

void Algorithm1Config::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidInput("algorithm1.alpha must be > 0");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw InvalidInput("algorithm1.radii must be positive");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw InvalidInput("algorithm1.radii must be strictly increasing");
    }
    if (!std::isfinite(radius_increment)) throw InvalidInput("algorithm1.radius_increment must be finite");
    if (circle_divisions == 0) throw InvalidInput("algorithm1.circle_divisions must be >= 1");
    if (points_per_circle == 0) throw InvalidInput("algorithm1.points_per_circle must be >= 1");
    if (max_iterations == 0) throw InvalidInput("algorithm1.max_iterations must be >= 1");
    if (!(fit.ridge >= 0.0)) throw InvalidInput("algorithm1.ridge must be >= 0");
    if (!(fit.smoothness >= 0.0)) throw InvalidInput("algorithm1.smoothness must be >= 0");
    if (!(fit.period_factor >= 1.0)) throw InvalidInput("algorithm1.period_factor must be >= 1");
    if (geodesic.resolution < 3) throw InvalidInput("algorithm1.geodesic_resolution must be >= 3");
    if (geodesic.stencil_radius < 1) throw InvalidInput("algorithm1.stencil_radius must be >= 1");
    if (error_resolution < 2) throw InvalidInput("algorithm1.error_resolution must be >= 2");
}

Algorithm1Result build_surrogate(const BenchmarkSpec& spec, const NoiseModel& noise, const Algorithm1Config& cfg) {
    cfg.validate();
    noise.validate();
    NoisyOracle oracle(spec, noise);
    const ScalarField observe = [&oracle](std::span<const double> x) { return oracle(x); };
    const Domain& dom = spec.domain();

    Algorithm1Result res;
    res.samples = corner_samples(dom, observe);
    res.samples.add(midpoint_sample(dom, observe));
    res.surrogate = fit_coefficients_ls(res.samples, cfg.order, dom, cfg.fit);
    for (const auto& s : res.samples) {
        res.trace.push_back({0, s.location, s.value, s.value, true, 0.0});
    }
    res.evaluations = res.samples.size();

    const Point centre = dom.midpoint();
    const bool planar = dom.dim() == 2;
    std::optional<DistanceField> field;
    if (planar) field = geodesic_distance_field(res.surrogate, centre, cfg.geodesic);

    double increment = cfg.radius_increment;
    if (cfg.radii.empty() && increment <= 0.0) {
        double reach = 0.0;
        if (planar) {
            reach = field->boundary_distance();
        } else {
            reach = 0.5 * dom.min_width();
        }
        increment = reach / static_cast<double>(cfg.circle_divisions);
    }
    res.radius_increment = increment;

    for (std::size_t z = 1; z <= cfg.max_iterations; ++z) {
        double r = 0.0;
        if (!cfg.radii.empty()) {
            if (z > cfg.radii.size()) break;
            r = cfg.radii[z - 1];
        } else {
            r = static_cast<double>(z) * increment;
        }
        const std::uint64_t phase_seed = derive_seed(cfg.seed, z);
        const GeodesicCircle circle = planar
            ? circle_from_field(*field, centre, r, cfg.points_per_circle, phase_seed, cfg.geodesic.rays)
            : geodesic_circle(res.surrogate, centre, r, cfg.points_per_circle, phase_seed, cfg.geodesic);
        if (circle.boundary_crossed) {
            res.boundary_reached = true;
            break;
        }
        res.iterations = z;

        bool changed = false;
        for (const auto& q : circle.points) {
            const Point qc = dom.clamp(q);
            const double f = oracle(qc);
            const double fs = res.surrogate.evaluate(qc);
            ++res.evaluations;
            const bool accepted = accept_sample(f, fs, cfg.alpha) == Acceptance::kAccept;
            res.trace.push_back({z, qc, f, fs, accepted, r});
            if (accepted) {
                res.samples.add({qc, f, CircleTag{z, r}});
                changed = true;
            }
        }
        if (changed) {
            res.surrogate = fit_coefficients_ls(res.samples, cfg.order, dom, cfg.fit);
            if (planar) field = geodesic_distance_field(res.surrogate, centre, cfg.geodesic);
        }
    }

    res.report = approximation_error(res.surrogate, spec.as_field(), cfg.error_resolution, res.samples.size());
    return res;
}

void DenseFitConfig::validate() const {
    if (per_dim < 2) throw InvalidInput("dense.grid must be >= 2");
    if (!(fit.ridge >= 0.0)) throw InvalidInput("dense.ridge must be >= 0");
    if (!(fit.period_factor >= 1.0)) throw InvalidInput("dense.period_factor must be >= 1");
    if (error_resolution < 2) throw InvalidInput("dense.error_resolution must be >= 2");
}

Algorithm1Result build_dense_surrogate(const BenchmarkSpec& spec, const DenseFitConfig& cfg) {
    cfg.validate();
    Algorithm1Result res;
    res.samples = grid_samples(spec.domain(), cfg.per_dim, spec.as_field());
    res.surrogate = fit_coefficients_ls(res.samples, cfg.order, spec.domain(), cfg.fit);
    res.evaluations = res.samples.size();
    for (const auto& s : res.samples) res.trace.push_back({0, s.location, s.value, s.value, true, 0.0});
    res.report = approximation_error(res.surrogate, spec.as_field(), cfg.error_resolution, res.samples.size());
    return res;
}

}  // namespace surroflow
