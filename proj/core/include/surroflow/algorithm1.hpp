#pragma once

#include <cstdint>
#include <vector>

#include "surroflow/bench_functions.hpp"
#include "surroflow/fourier_surrogate.hpp"
#include "surroflow/geodesic.hpp"

namespace surroflow {

/// Oracle evaluated at each corner of the box (2^n samples, boundary provenance).
SampleSet corner_samples(const Domain& domain, const ScalarField& oracle);

/// Oracle evaluated at the centre of the box (midpoint provenance).
Sample midpoint_sample(const Domain& domain, const ScalarField& oracle);

enum class Acceptance { kAccept, kReject };

/// A sample the surrogate already predicts to within alpha carries no new
/// information: reject iff |true - surrogate| <= alpha.
Acceptance accept_sample(double true_value, double surrogate_value, double alpha);

struct Algorithm1Config {
    std::size_t order = 3;
    double alpha = 0.1;
    /// Explicit radius schedule (strictly increasing). When empty the schedule is
    /// r_z = z * radius_increment.
    std::vector<double> radii;
    /// Fixed radius step in metric units; <= 0 derives it as the distance from the
    /// centre to the nearest boundary point on the initial surrogate divided by
    /// circle_divisions.
    double radius_increment = 0.0;
    std::size_t circle_divisions = 20;
    std::size_t points_per_circle = 16;
    std::size_t max_iterations = 100;
    /// Drives the random phase of each circle.
    std::uint64_t seed = 0;
    FitOptions fit{1e-3, 4.0, 2.0};
    GeodesicOptions geodesic;
    /// Grid nodes per dimension for the final error report.
    std::size_t error_resolution = 200;

    void validate() const;
};

/// One evaluated point of the sampling loop (seeds have iteration 0 and radius 0).
struct TraceRecord {
    std::size_t iteration = 0;
    Point location;
    double true_value = 0.0;
    double surrogate_value = 0.0;
    bool accepted = false;
    double radius = 0.0;
};

struct Algorithm1Result {
    FourierSurrogate surrogate;
    /// Seeds plus every accepted circle sample, in insertion order.
    SampleSet samples;
    std::vector<TraceRecord> trace;
    ErrorReport report;
    /// Circles drawn (the terminating boundary-crossing circle is not counted).
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool boundary_reached = false;
    double radius_increment = 0.0;
};

/// Corner and midpoint seeding, initial fit, then geodesic circles of growing
/// radius around the midpoint with alpha-acceptance and a refit after every
/// circle, until a circle reaches the boundary or max_iterations is hit.
Algorithm1Result build_surrogate(const BenchmarkSpec& spec, const NoiseModel& noise, const Algorithm1Config& cfg);

/// Dense setting: exact values on a uniform per_dim^n grid, fitted by least squares.
struct DenseFitConfig {
    std::size_t order = 10;
    std::size_t per_dim = 60;
    FitOptions fit{1e-8, 0.0, 2.0};
    std::size_t error_resolution = 200;

    void validate() const;
};

Algorithm1Result build_dense_surrogate(const BenchmarkSpec& spec, const DenseFitConfig& cfg);

}  // namespace surroflow
