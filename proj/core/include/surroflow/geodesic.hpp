#pragma once

#include <cstdint>
#include <vector>

#include "surroflow/fourier_surrogate.hpp"
#include "surroflow/types.hpp"

namespace surroflow {

/// Discretisation of the graph metric g = I + lambda^2 grad F grad F^T, where
/// lambda is a height scale that puts the surrogate's value range on the same
/// footing as the domain width.
struct GeodesicOptions {
    /// Grid nodes per dimension for the shortest-path solve.
    std::size_t resolution = 200;
    /// Neighbour offsets (i, j) with gcd(|i|, |j|) = 1 and max(|i|, |j|) <= radius.
    /// Radius 1 is the 8-connected stencil.
    int stencil_radius = 5;
    /// Height scale lambda; <= 0 selects it automatically (width / value range).
    double height_scale = 0.0;
    /// Rays cast from the centre when extracting a level set.
    std::size_t rays = 720;
};

/// Shortest-path distance from a source point, sampled on a tensor grid.
struct DistanceField {
    GridAxis x;
    GridAxis y;
    Grid2D distance;
    double height_scale = 1.0;

    /// Bilinear interpolation; x must lie inside the grid box.
    double at(std::span<const double> p) const;
    /// Smallest distance over all boundary nodes.
    double boundary_distance() const;
};

/// Neighbour offsets used by the shortest-path solver, as (di, dj) pairs.
std::vector<std::pair<int, int>> stencil_offsets(int radius);

/// lambda = max domain width / (max F - min F) over a resolution^2 grid; 1 for flat surrogates.
double auto_height_scale(const FourierSurrogate& s, std::size_t resolution);

/// Dijkstra on the grid graph whose edge lengths are the chord lengths of the
/// embedded surface (x, y, lambda F). Values are taken from `heights` (rows
/// follow y); every node within `stencil_radius` cells of the source p is
/// seeded with its straight chord length from p.
DistanceField shortest_path_field(const Grid2D& heights, const GridAxis& x, const GridAxis& y,
                                  std::span<const double> p, double height_scale, int stencil_radius);

DistanceField geodesic_distance_field(const FourierSurrogate& s, std::span<const double> p,
                                      const GeodesicOptions& options = {});

struct GeodesicCircle {
    /// Points at distance r from the centre; empty when boundary_crossed.
    std::vector<Point> points;
    /// The r-level set reaches the domain boundary.
    bool boundary_crossed = false;
    double radius = 0.0;
};

/// Level set {q : d(p, q) = r} sampled at `count` points equally spaced in arc
/// length, with a random phase drawn from `seed`. For n = 2 the distance is the
/// graph-metric shortest path; for n > 2 points are taken on a metric-scaled
/// Euclidean sphere r / sqrt(1 + lambda^2 (grad F(p) . u)^2) along direction u.
GeodesicCircle geodesic_circle(const FourierSurrogate& s, std::span<const double> p, double r, std::size_t count,
                               std::uint64_t seed, const GeodesicOptions& options = {});

/// Same as above, reusing a distance field that was already computed for p.
GeodesicCircle circle_from_field(const DistanceField& field, std::span<const double> p, double r, std::size_t count,
                                 std::uint64_t seed, std::size_t rays = 720);

}  // namespace surroflow
