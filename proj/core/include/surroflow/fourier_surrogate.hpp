#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "surroflow/bench_functions.hpp"
#include "surroflow/types.hpp"

namespace surroflow {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;

/// Truncated multivariate Fourier series
///
///     F(x) = Re sum_{k in {-M..M}^n} a_k exp(j sum_d k_d w_d (x_d - o_d))
///
/// over an axis-aligned box. The period along dimension d is P * width_d,
/// where P >= 1 is the period factor, w_d = 2 pi / (P * width_d), and o_d is
/// the lower edge of the period window centred on the box. With P = 1 the box
/// is exactly one period and o is the box's lower corner.
///
/// Coefficients live on the full symmetric cube, dimension 0 varying fastest.
class FourierSurrogate {
public:
    FourierSurrogate() = default;
    FourierSurrogate(std::size_t order, Domain domain, double period_factor = 1.0);
    FourierSurrogate(std::size_t order, Domain domain, double period_factor, std::vector<Complex> coefficients);

    std::size_t order() const noexcept { return order_; }
    std::size_t dim() const noexcept { return domain_.dim(); }
    const Domain& domain() const noexcept { return domain_; }
    double period_factor() const noexcept { return period_factor_; }
    const std::vector<double>& omega() const noexcept { return omega_; }
    const std::vector<double>& origin() const noexcept { return origin_; }
    /// Period length along dimension d.
    double period(std::size_t d) const { return period_factor_ * domain_[d].width(); }

    /// (2M+1)^n.
    std::size_t term_count() const noexcept { return coefficients_.size(); }
    const std::vector<Complex>& coefficients() const noexcept { return coefficients_; }
    std::vector<Complex>& coefficients() noexcept { return coefficients_; }

    MultiIndex index_of(std::size_t flat) const;
    std::size_t flat_of(std::span<const int> k) const;
    Complex& coefficient(std::span<const int> k) { return coefficients_[flat_of(k)]; }
    Complex coefficient(std::span<const int> k) const { return coefficients_[flat_of(k)]; }

    /// Largest |a_k - conj(a_{-k})| over the cube.
    double hermitian_defect() const;

    double evaluate(std::span<const double> x) const;
    double operator()(std::span<const double> x) const { return evaluate(x); }
    /// The untruncated complex sum (its imaginary part vanishes for Hermitian maps).
    Complex evaluate_complex(std::span<const double> x) const;
    std::vector<double> gradient(std::span<const double> x) const;
    /// Row-major n x n.
    std::vector<double> hessian(std::span<const double> x) const;

    /// Values on a tensor grid (n = 2 only); rows follow y, columns follow x.
    Grid2D evaluate_grid(const GridAxis& x_axis, const GridAxis& y_axis) const;

    ScalarField as_field() const;

private:
    /// exp(j m w_d x'_d) for m = -M..M, one block of 2M+1 per dimension.
    std::vector<Complex> phase_table(std::span<const double> x) const;

    std::size_t order_ = 0;
    Domain domain_;
    double period_factor_ = 1.0;
    std::vector<double> omega_;
    std::vector<double> origin_;
    std::vector<Complex> coefficients_;
};

/// Literal Monte-Carlo estimator a_k = (1/N) sum_i y_i exp(-j k . w x_i').
FourierSurrogate estimate_coefficients_mc(const SampleSet& samples, std::size_t order, const Domain& domain,
                                          double period_factor = 1.0);

struct FitOptions {
    /// Penalty weight on sum_k w_k |a_k|^2. Zero asks for an unregularised solve.
    double ridge = 1e-8;
    /// Sobolev exponent of the penalty weights w_k = (1 + |k|^2)^s; 0 gives a plain ridge.
    double smoothness = 0.0;
    double period_factor = 1.0;
};

/// Regularised least squares over Hermitian-symmetric coefficient maps.
/// Throws IllConditioned if ridge = 0 and the system is rank deficient.
FourierSurrogate fit_coefficients_ls(const SampleSet& samples, std::size_t order, const Domain& domain,
                                     const FitOptions& options = {});

/// Penalised objective sum_i (F(x_i) - y_i)^2 + ridge * sum_k w_k |a_k|^2 of a given surrogate.
double ls_objective(const FourierSurrogate& s, const SampleSet& samples, const FitOptions& options);

struct ErrorReport {
    double mae = 0.0;
    double mse = 0.0;
    /// Empty when the truth has zero variance on the grid (R^2 undefined).
    std::optional<double> r_squared;
    double max_abs_error = 0.0;
    std::size_t n_samples = 0;
    std::size_t resolution = 0;

    bool degenerate() const noexcept { return !r_squared.has_value(); }
};

/// Compares surrogate and truth on a uniform resolution^n grid over the surrogate's domain.
ErrorReport approximation_error(const FourierSurrogate& s, const ScalarField& truth, std::size_t resolution = 200,
                                std::size_t n_samples = 0);

/// Uniform tensor grid of `per_dim` nodes per dimension with exact values, tagged as grid samples.
SampleSet grid_samples(const Domain& domain, std::size_t per_dim, const ScalarField& f);

}  // namespace surroflow
