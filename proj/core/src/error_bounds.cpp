#include "surroflow/error_bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace surroflow {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(name) + " must be finite and > 0");
}

BoundBreakdown evaluate_bound(double c_f, double c_s, double c_sigma, double s, std::size_t n, double delta,
                              std::size_t n_samples, double truncation) {
    BoundBreakdown b;
    const double nn = static_cast<double>(n_samples);
    b.n_samples = n_samples;
    b.truncation = truncation;
    b.e_fourier = c_f * std::pow(truncation, -s);
    b.e_sampling = c_s * std::pow(nn, -1.0 / static_cast<double>(n));
    b.e_noise = c_sigma * std::sqrt(std::log(1.0 / delta) / nn);
    b.e_total = b.e_fourier + b.e_sampling + b.e_noise;
    return b;
}

/// Non-negative least squares for y ~ a*u + b*v by enumerating active sets.
std::pair<double, double> nnls2(const std::vector<double>& u, const std::vector<double>& v, const std::vector<double>& y) {
    double suu = 0, svv = 0, suv = 0, suy = 0, svy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        suu += u[i] * u[i];
        svv += v[i] * v[i];
        suv += u[i] * v[i];
        suy += u[i] * y[i];
        svy += v[i] * y[i];
    }
    auto residual = [&](double a, double b) {
        double r = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double e = y[i] - a * u[i] - b * v[i];
            r += e * e;
        }
        return r;
    };
    std::array<std::pair<double, double>, 4> options{{{0.0, 0.0},
                                                       {suu > 0 ? std::max(0.0, suy / suu) : 0.0, 0.0},
                                                       {0.0, svv > 0 ? std::max(0.0, svy / svv) : 0.0},
                                                       {-1.0, -1.0}}};
    const double det = suu * svv - suv * suv;
    if (std::abs(det) > 1e-14 * std::max(1.0, suu * svv)) {
        options[3] = {(suy * svv - svy * suv) / det, (svy * suu - suy * suv) / det};
    }
    std::pair<double, double> best{0.0, 0.0};
    double best_r = residual(0.0, 0.0);
    for (const auto& o : options) {
        if (o.first < 0.0 || o.second < 0.0) continue;
        const double r = residual(o.first, o.second);
        if (r < best_r) {
            best_r = r;
            best = o;
        }
    }
    return best;
}

struct Draw {
    SampleSet clean;
    SampleSet noisy;
};

Draw draw_samples(const BenchmarkSpec& spec, std::size_t count, const DecayCheckConfig& cfg) {
    Draw d;
    const std::uint64_t base = derive_seed(cfg.seed, count);
    if (cfg.sampling == DecaySampling::kUniformRandom) {
        NoiseModel clean{NoiseKind::kNone, 0.0, base};
        NoiseModel noisy{NoiseKind::kAdditiveGaussian, cfg.sigma, base};
        d.clean = sample_stochastic(spec, count, clean);
        d.noisy = cfg.sigma > 0.0 ? sample_stochastic(spec, count, noisy) : d.clean;
        return d;
    }
    const std::size_t n = spec.dim();
    const auto per_dim = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(count), 1.0 / static_cast<double>(n)))));
    d.clean = grid_samples(spec.domain(), per_dim, spec.as_field());
    if (cfg.sigma > 0.0) {
        std::mt19937_64 rng(base);
        std::normal_distribution<double> gauss(0.0, cfg.sigma);
        for (const auto& s : d.clean) d.noisy.add({s.location, s.value + gauss(rng), s.provenance});
    } else {
        d.noisy = d.clean;
    }
    return d;
}

FourierSurrogate fit(const SampleSet& samples, const Domain& domain, const DecayCheckConfig& cfg) {
    if (cfg.fit_path == FitPath::kMonteCarlo) {
        return estimate_coefficients_mc(samples, cfg.order, domain, cfg.fit.period_factor);
    }
    return fit_coefficients_ls(samples, cfg.order, domain, cfg.fit);
}

}  // namespace

void BoundParams::validate() const {
    check_positive(c_f, "C_F");
    check_positive(c_s, "C_S");
    check_positive(c_sigma, "C_sigma");
    check_positive(s, "s");
    if (n == 0) throw InvalidInput("dimension n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (lipschitz && !(*lipschitz >= 0.0)) throw InvalidInput("Lipschitz constant must be >= 0");
    if (gap && !(*gap >= 0.0)) throw InvalidInput("sample gap must be >= 0");
}

std::string_view to_string(TruncationMode mode) noexcept {
    return mode == TruncationMode::kSampleCount ? "sample-count" : "term-count";
}

TruncationMode truncation_mode_from_string(std::string_view text) {
    if (text == "sample-count") return TruncationMode::kSampleCount;
    if (text == "term-count") return TruncationMode::kTermCount;
    throw InvalidInput("truncation mode must be \"sample-count\" or \"term-count\"");
}

BoundBreakdown total_error_bound(const BoundParams& params, std::size_t n_samples) {
    return total_error_bound(params, n_samples, static_cast<double>(n_samples));
}

BoundBreakdown total_error_bound(const BoundParams& params, std::size_t n_samples, double truncation) {
    params.validate();
    if (n_samples == 0) throw InvalidInput("sample count N must be >= 1");
    if (!(truncation >= 1.0)) throw InvalidInput("truncation size must be >= 1");
    return evaluate_bound(params.c_f, params.c_s, params.c_sigma, params.s, params.n, params.delta, n_samples,
                          truncation);
}

double gap_sampling_bound(const BoundParams& params) {
    if (!params.gap) throw InvalidInput("sample gap Delta is not set");
    params.validate();
    return params.c_s * *params.gap;
}

double uniform_gap(std::size_t n_samples, std::size_t n) {
    if (n_samples == 0 || n == 0) throw InvalidInput("uniform_gap needs N >= 1 and n >= 1");
    return std::pow(static_cast<double>(n_samples), -1.0 / static_cast<double>(n));
}

DecayReport empirical_decay_check(const BenchmarkSpec& spec, std::span<const std::size_t> sizes,
                                  const DecayCheckConfig& cfg) {
    if (sizes.size() < 3) throw InvalidInput("empirical_decay_check needs at least 3 sample sizes");
    if (!(cfg.sigma >= 0.0)) throw InvalidInput("noise sigma must be >= 0");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (!(cfg.s > 0.0)) throw InvalidInput("smoothness s must be > 0");
    const std::size_t n = spec.dim();
    const double terms = std::pow(2.0 * static_cast<double>(cfg.order) + 1.0, static_cast<double>(n));

    DecayReport rep;
    rep.mode = cfg.mode;
    for (std::size_t count : sizes) {
        if (count == 0) throw InvalidInput("sample sizes must be >= 1");
        const Draw d = draw_samples(spec, count, cfg);
        const auto clean_fit = fit(d.clean, spec.domain(), cfg);
        const auto clean = approximation_error(clean_fit, spec.as_field(), cfg.resolution, d.clean.size());
        DecayPoint p;
        p.n_samples = d.clean.size();
        p.measured_mae = clean.mae;
        p.measured_max = clean.max_abs_error;
        if (cfg.sigma > 0.0) {
            const auto noisy = approximation_error(fit(d.noisy, spec.domain(), cfg), spec.as_field(), cfg.resolution,
                                                   d.noisy.size());
            p.noisy_mae = noisy.mae;
            p.noisy_max = noisy.max_abs_error;
        } else {
            p.noisy_mae = p.measured_mae;
            p.noisy_max = p.measured_max;
        }
        rep.series.push_back(p);
    }

    auto truncation_of = [&](const DecayPoint& p) {
        return cfg.mode == TruncationMode::kSampleCount ? static_cast<double>(p.n_samples) : terms;
    };

    // Clean errors determine C_F and C_S; N^{-1/2} and the noise term are
    // collinear for n = 2, so C_sigma is read off the noise-induced excess only.
    std::vector<double> u, v, y, x, excess;
    const double log_term = std::log(1.0 / cfg.delta);
    for (const auto& p : rep.series) {
        u.push_back(std::pow(truncation_of(p), -cfg.s));
        v.push_back(std::pow(static_cast<double>(p.n_samples), -1.0 / static_cast<double>(n)));
        y.push_back(p.measured_max);
        x.push_back(std::sqrt(log_term / static_cast<double>(p.n_samples)));
        excess.push_back(std::max(0.0, p.noisy_max - p.measured_max));
    }
    const auto [c_f, c_s] = nnls2(u, v, y);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * excess[i];
    }
    const double c_sigma = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;

    double scale = 1.0;
    bool coverable = true;
    for (std::size_t i = 0; i < rep.series.size(); ++i) {
        const auto& p = rep.series[i];
        const auto b = evaluate_bound(c_f, c_s, c_sigma, cfg.s, n, cfg.delta, p.n_samples, truncation_of(p));
        const double need = std::max(p.measured_max, p.noisy_max);
        if (b.e_total > 0.0) {
            scale = std::max(scale, need / b.e_total);
        } else if (need > 0.0) {
            coverable = false;
        }
    }
    rep.scale = scale;
    rep.c_f = c_f * scale;
    rep.c_s = c_s * scale;
    rep.c_sigma = c_sigma * scale;
    rep.dominates = coverable;
    for (auto& p : rep.series) {
        p.bound = evaluate_bound(rep.c_f, rep.c_s, rep.c_sigma, cfg.s, n, cfg.delta, p.n_samples, truncation_of(p));
        if (p.bound.e_total < std::max(p.measured_max, p.noisy_max) * (1.0 - 1e-12)) rep.dominates = false;
    }
    return rep;
}

}  // namespace surroflow
