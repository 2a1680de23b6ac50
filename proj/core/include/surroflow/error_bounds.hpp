#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "surroflow/bench_functions.hpp"
#include "surroflow/fourier_surrogate.hpp"

namespace surroflow {

/// Constants of the additive error model
///     E(N) <= C_F T^{-s} + C_S N^{-1/n} + C_sigma sqrt(log(1/delta) / N)
/// where T is the truncation size (equal to N in the single-N form).
struct BoundParams {
    double c_f = 1.0;
    double c_s = 1.0;
    double c_sigma = 1.0;
    /// Sobolev smoothness order.
    double s = 1.0;
    std::size_t n = 2;
    /// Confidence parameter in (0, 1).
    double delta = 0.05;
    /// Lipschitz constant (informational; not part of the bound).
    std::optional<double> lipschitz;
    /// Largest gap between neighbouring samples.
    std::optional<double> gap;

    void validate() const;
};

struct BoundBreakdown {
    double e_fourier = 0.0;
    double e_sampling = 0.0;
    double e_noise = 0.0;
    double e_total = 0.0;
    std::size_t n_samples = 0;
    /// Value used for T in the truncation term.
    double truncation = 0.0;
};

/// How the truncation term is indexed.
enum class TruncationMode {
    /// T = N (the same N as the sample count).
    kSampleCount,
    /// T = (2M+1)^n, the number of retained Fourier terms.
    kTermCount,
};

std::string_view to_string(TruncationMode mode) noexcept;
TruncationMode truncation_mode_from_string(std::string_view text);

/// Single-N form: T = N.
BoundBreakdown total_error_bound(const BoundParams& params, std::size_t n_samples);
/// Split form with an explicit truncation size T.
BoundBreakdown total_error_bound(const BoundParams& params, std::size_t n_samples, double truncation);

/// C_S * Delta. Throws InvalidInput when the gap is unset.
double gap_sampling_bound(const BoundParams& params);

/// N^{-1/n}: the spacing of a uniform grid holding N points in the unit n-cube.
double uniform_gap(std::size_t n_samples, std::size_t n);

enum class DecaySampling { kUniformRandom, kUniformGrid };
enum class FitPath { kLeastSquares, kMonteCarlo };

struct DecayCheckConfig {
    std::size_t order = 3;
    FitPath fit_path = FitPath::kLeastSquares;
    FitOptions fit{1e-3, 3.0, 2.0};
    DecaySampling sampling = DecaySampling::kUniformRandom;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    /// Evaluation grid per dimension for the error metrics.
    std::size_t resolution = 100;
    TruncationMode mode = TruncationMode::kTermCount;
    double s = 1.0;
    double delta = 0.05;
};

struct DecayPoint {
    std::size_t n_samples = 0;
    double measured_mae = 0.0;
    double measured_max = 0.0;
    /// Errors of the noisy fit at the same locations (equal to the clean ones when sigma = 0).
    double noisy_mae = 0.0;
    double noisy_max = 0.0;
    BoundBreakdown bound;
};

struct DecayReport {
    std::vector<DecayPoint> series;
    /// Fitted constants after the dominance rescaling.
    double c_f = 0.0;
    double c_s = 0.0;
    double c_sigma = 0.0;
    /// Factor (>= 1) applied to the least-squares constants so the bound covers every point.
    double scale = 1.0;
    bool dominates = false;
    TruncationMode mode = TruncationMode::kTermCount;
};

/// Fits surrogates at each N, measures MAE and max error against the noise-free
/// truth, regresses non-negative C_F and C_S on the clean errors and C_sigma on
/// the excess error of noisy fits, then scales the constants so the bound
/// dominates every measured (max-error) point. Requires at least 3 sizes.
DecayReport empirical_decay_check(const BenchmarkSpec& spec, std::span<const std::size_t> sizes,
                                  const DecayCheckConfig& cfg);

}  // namespace surroflow
