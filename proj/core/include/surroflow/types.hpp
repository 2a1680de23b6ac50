#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace surroflow {

using Point = std::vector<double>;

/// Real-valued field over R^n. Benchmarks, oracles and surrogates all reduce to this.
using ScalarField = std::function<double(std::span<const double>)>;

/// Input rejected by a precondition (dimension mismatch, bad parameter, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Least-squares system without a unique solution at the requested ridge.
class IllConditioned : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Explicit flow step would violate dt * max|K| < 1.
class UnstableStep : public std::runtime_error {
public:
    UnstableStep(const std::string& what, double dt_times_curvature)
        : std::runtime_error(what), dt_times_curvature_(dt_times_curvature) {}
    double dt_times_curvature() const noexcept { return dt_times_curvature_; }

private:
    double dt_times_curvature_;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    double mid() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x, double tol = 0.0) const noexcept { return x >= lo - tol && x <= hi + tol; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Axis-aligned box, the product of closed intervals.
class Domain {
public:
    Domain() = default;
    explicit Domain(std::vector<Interval> intervals);

    std::size_t dim() const noexcept { return intervals_.size(); }
    const Interval& operator[](std::size_t d) const { return intervals_[d]; }
    const std::vector<Interval>& intervals() const noexcept { return intervals_; }

    bool contains(std::span<const double> x, double tol = 0.0) const;
    Point midpoint() const;
    Point clamp(std::span<const double> x) const;
    /// All 2^n corners, dimension 0 varying fastest.
    std::vector<Point> corners() const;
    double min_width() const;

    friend bool operator==(const Domain&, const Domain&) = default;

private:
    std::vector<Interval> intervals_;
};

/// Throws InvalidInput unless x has the expected dimension.
void require_dim(std::span<const double> x, std::size_t n, const char* what);

/// Uniformly spaced nodes lo + i*(hi-lo)/(count-1), endpoints included.
struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 2;

    double spacing() const noexcept { return (hi - lo) / static_cast<double>(count - 1); }
    double coord(std::size_t i) const noexcept {
        return i + 1 == count ? hi : lo + static_cast<double>(i) * spacing();
    }
};

/// Row-major rows x cols array; row index follows the second coordinate (y),
/// column index the first (x).
class Grid2D {
public:
    Grid2D() = default;
    Grid2D(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    double min() const;
    double max() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Counter-based seed splitting (splitmix64 finalizer) so that one master seed
/// fans out to independent streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

}  // namespace surroflow
