#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "surroflow/algorithm1.hpp"
#include "surroflow/bench_functions.hpp"
#include "surroflow/fourier_surrogate.hpp"

namespace surroflow {

enum class FlowDirection {
    /// du/dt = +K: curvature concentrates and blows up in finite time.
    kInverse,
    /// du/dt = -K: curvature diffuses (regularising heat flow).
    kForward,
};

struct FlowConfig {
    double dt = 1e-3;
    std::size_t iterations = 300;
    std::size_t nx = 200;
    std::size_t ny = 200;
    /// Stop once max |K_t - K_{t-1}| falls below this value.
    double convergence_threshold = 1e-5;
    /// |K| at or above this value marks a singularity.
    double blowup_threshold = 1e3;
    /// Conformal scaling of the normalised objective.
    double beta = 1e4;
    /// Initial max |K| as a fraction of blowup_threshold; sets the metric scale.
    double initial_curvature_fraction = 0.25;
    /// Suppression and freezing radius in grid cells.
    int freeze_radius = 5;
    std::size_t max_candidates = 10;
    /// Candidates whose normalised objective (0 = best grid value, 1 = worst)
    /// exceeds this level are discarded by the sense filter.
    double filter_level = 0.5;
    /// Upper bound on forward-flow substeps per iteration on frozen cells.
    std::size_t max_forward_substeps = 100;
    /// Refine each candidate inside its grid cell with one Newton step on the objective.
    bool subcell_refine = true;
    /// Snapshot cadence in iterations (0 disables snapshots).
    std::size_t plot_interval = 300;

    void validate() const;
};

/// Conformal metric g = exp(2u) I on a tensor grid, with
/// u = (beta / 2) * f_tilde + c, where f_tilde in [0, 1] is the objective
/// normalised so that the sought extremum sits at 0 (sense-adjusted) and c
/// fixes the metric scale so that the initial max |K| is
/// initial_curvature_fraction * blowup_threshold.
struct MetricField {
    GridAxis x;
    GridAxis y;
    Grid2D u;
    /// Objective values on the grid (not normalised).
    Grid2D objective;
    double beta = 0.0;
    Sense sense = Sense::kMin;
    double t = 0.0;
    double scale_offset = 0.0;
    double objective_min = 0.0;
    double objective_max = 0.0;

    /// Sense-adjusted objective at a grid node, 0 at the best value and 1 at the worst.
    double normalised(std::size_t r, std::size_t c) const;
};

struct CurvatureField {
    GridAxis x;
    GridAxis y;
    /// Gaussian curvature K = -exp(-2u) Lap(u).
    Grid2D k;
};

struct Candidate {
    Point location;
    double surrogate_value = 0.0;
    std::optional<double> true_value;
    std::size_t iteration = 0;
    /// |K| at detection.
    double peak_curvature = 0.0;
    Sense sense = Sense::kMin;
    std::size_t row = 0;
    std::size_t col = 0;
};

MetricField init_metric(const FourierSurrogate& s, const FlowConfig& cfg, Sense sense);
MetricField init_metric(Grid2D objective, const GridAxis& x, const GridAxis& y, const FlowConfig& cfg, Sense sense);

CurvatureField gaussian_curvature(const MetricField& m);

/// One explicit Euler step u <- u + dt K (inverse) or u <- u - dt K (forward)
/// on cells where `frozen` is zero (an empty mask freezes nothing). Throws
/// UnstableStep when dt * max|K| >= 1 over the updated cells and InvalidInput
/// if the result is not finite.
MetricField flow_step(const MetricField& m, const FlowConfig& cfg, FlowDirection direction,
                      std::span<const std::uint8_t> frozen = {});

/// Local maxima of |K| with |K| >= blowup_threshold, greedily suppressed within
/// freeze_radius (strongest first). Cells flagged in `exclude` are skipped.
std::vector<Candidate> detect_singularities(const CurvatureField& k, const MetricField& m, const FlowConfig& cfg,
                                            std::span<const std::uint8_t> exclude = {});

enum class OptimizeStatus { kFound, kNoCandidates };

struct OptimizeResult {
    OptimizeStatus status = OptimizeStatus::kNoCandidates;
    /// Filtered and ranked, best first.
    std::vector<Candidate> candidates;
    /// Every detection before filtering, in detection order.
    std::vector<Candidate> detections;
    std::size_t iterations = 0;
    bool converged = false;
    /// max |K| over non-frozen cells at the start of each iteration.
    std::vector<double> peak_curvature_trace;
    double final_time = 0.0;

    const Candidate& best() const;
};

/// Called every plot_interval iterations and once at the end with the current fields.
using SnapshotSink = std::function<void(std::size_t iteration, const MetricField&, const CurvatureField&)>;

/// Inverse flow until blow-up, freezing detected regions (which then follow the
/// forward flow) while the remainder keeps flowing inversely, until
/// max_candidates are found, the curvature becomes stationary, or the
/// iteration budget is exhausted. Candidates are filtered by the sense filter,
/// refined inside their cell, evaluated by the oracle when given, and ranked.
OptimizeResult optimize(const FourierSurrogate& s, const FlowConfig& cfg, Sense sense,
                        const ScalarField& oracle = {}, const SnapshotSink& sink = {});

/// Same, for an arbitrary objective sampled on the cfg grid over `domain`.
OptimizeResult optimize(const ScalarField& objective, const Domain& domain, const FlowConfig& cfg, Sense sense,
                        const ScalarField& oracle = {}, const SnapshotSink& sink = {});

struct HybridResult {
    Algorithm1Result surrogate_run;
    OptimizeResult optimum;
    Domain zoom;
};

/// Rebuild the surrogate on `zoom` with a raised order and optimise again.
HybridResult refine_hybrid(const BenchmarkSpec& spec, const Candidate& best, const Domain& zoom, std::size_t order,
                           const Algorithm1Config& alg1, const NoiseModel& noise, const FlowConfig& flow, Sense sense);

/// Box of relative size `shrink` (per dimension) centred on `centre`, shifted to
/// stay inside `domain`.
Domain zoom_domain(const Domain& domain, std::span<const double> centre, double shrink);

}  // namespace surroflow
