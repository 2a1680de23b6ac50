#include "surroflow/fourier_surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace surroflow {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r *= base;
    return r;
}

void check_order_and_domain(std::size_t order, const Domain& domain, double period_factor) {
    if (domain.dim() == 0) throw InvalidInput("surrogate domain must have at least one dimension");
    if (!(period_factor >= 1.0) || !std::isfinite(period_factor)) {
        throw InvalidInput("period factor must be finite and >= 1");
    }
    const double terms = std::pow(2.0 * static_cast<double>(order) + 1.0, static_cast<double>(domain.dim()));
    if (terms > 1e7) throw InvalidInput("Fourier order too large for the dimension");
}

/// Odometer over {-M..M}^n, dimension 0 fastest.
void advance(MultiIndex& k, int m) {
    for (auto& kd : k) {
        if (kd < m) {
            ++kd;
            return;
        }
        kd = -m;
    }
}

/// Index k is in the half set if its last nonzero component is positive.
bool in_half_set(const MultiIndex& k) {
    for (auto it = k.rbegin(); it != k.rend(); ++it) {
        if (*it != 0) return *it > 0;
    }
    return false;
}

double sobolev_weight(const MultiIndex& k, double s) {
    if (s == 0.0) return 1.0;
    double norm2 = 0.0;
    for (int kd : k) norm2 += static_cast<double>(kd) * kd;
    return std::pow(1.0 + norm2, s);
}

void check_samples(const SampleSet& samples, const Domain& domain, const char* what) {
    if (samples.empty()) throw InvalidInput(std::string(what) + ": empty sample set");
    if (samples.dim() != domain.dim()) throw InvalidInput(std::string(what) + ": sample dimension does not match domain");
    for (const auto& s : samples) {
        if (!std::isfinite(s.value)) throw InvalidInput(std::string(what) + ": non-finite sample value");
    }
}

}  // namespace

FourierSurrogate::FourierSurrogate(std::size_t order, Domain domain, double period_factor)
    : order_(order), domain_(std::move(domain)), period_factor_(period_factor) {
    check_order_and_domain(order_, domain_, period_factor_);
    const std::size_t n = domain_.dim();
    omega_.resize(n);
    origin_.resize(n);
    for (std::size_t d = 0; d < n; ++d) {
        const double period = period_factor_ * domain_[d].width();
        omega_[d] = 2.0 * std::numbers::pi / period;
        origin_[d] = period_factor_ == 1.0 ? domain_[d].lo : domain_[d].mid() - 0.5 * period;
    }
    coefficients_.assign(ipow(2 * order_ + 1, n), Complex{});
}

FourierSurrogate::FourierSurrogate(std::size_t order, Domain domain, double period_factor,
                                   std::vector<Complex> coefficients)
    : FourierSurrogate(order, std::move(domain), period_factor) {
    if (coefficients.size() != coefficients_.size()) {
        throw InvalidInput("coefficient count must equal (2M+1)^n");
    }
    coefficients_ = std::move(coefficients);
}

MultiIndex FourierSurrogate::index_of(std::size_t flat) const {
    const std::size_t side = 2 * order_ + 1;
    MultiIndex k(dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        k[d] = static_cast<int>(flat % side) - static_cast<int>(order_);
        flat /= side;
    }
    return k;
}

std::size_t FourierSurrogate::flat_of(std::span<const int> k) const {
    if (k.size() != dim()) throw InvalidInput("multi-index dimension mismatch");
    const std::size_t side = 2 * order_ + 1;
    const int m = static_cast<int>(order_);
    std::size_t flat = 0;
    for (std::size_t d = dim(); d-- > 0;) {
        if (k[d] < -m || k[d] > m) throw InvalidInput("multi-index outside {-M..M}^n");
        flat = flat * side + static_cast<std::size_t>(k[d] + m);
    }
    return flat;
}

double FourierSurrogate::hermitian_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < coefficients_.size(); ++i) {
        MultiIndex k = index_of(i);
        for (auto& kd : k) kd = -kd;
        worst = std::max(worst, std::abs(coefficients_[i] - std::conj(coefficients_[flat_of(k)])));
    }
    return worst;
}

std::vector<Complex> FourierSurrogate::phase_table(std::span<const double> x) const {
    const std::size_t side = 2 * order_ + 1;
    const int m = static_cast<int>(order_);
    std::vector<Complex> table(side * dim());
    for (std::size_t d = 0; d < dim(); ++d) {
        const double theta = omega_[d] * (x[d] - origin_[d]);
        for (int kd = -m; kd <= m; ++kd) table[d * side + static_cast<std::size_t>(kd + m)] = std::polar(1.0, kd * theta);
    }
    return table;
}

Complex FourierSurrogate::evaluate_complex(std::span<const double> x) const {
    require_dim(x, dim(), "FourierSurrogate::evaluate");
    const auto table = phase_table(x);
    const std::size_t side = 2 * order_ + 1;
    const std::size_t n = dim();
    // Nested sum: contract dimension 0 first, then fold the remaining ones.
    std::vector<Complex> acc(coefficients_.size() / side);
    for (std::size_t outer = 0; outer < acc.size(); ++outer) {
        Complex s{};
        const Complex* a = &coefficients_[outer * side];
        for (std::size_t i = 0; i < side; ++i) s += a[i] * table[i];
        acc[outer] = s;
    }
    for (std::size_t d = 1; d < n; ++d) {
        std::vector<Complex> next(acc.size() / side);
        for (std::size_t outer = 0; outer < next.size(); ++outer) {
            Complex s{};
            for (std::size_t i = 0; i < side; ++i) s += acc[outer * side + i] * table[d * side + i];
            next[outer] = s;
        }
        acc = std::move(next);
    }
    return acc.front();
}

double FourierSurrogate::evaluate(std::span<const double> x) const { return evaluate_complex(x).real(); }

std::vector<double> FourierSurrogate::gradient(std::span<const double> x) const {
    require_dim(x, dim(), "FourierSurrogate::gradient");
    const auto table = phase_table(x);
    const std::size_t side = 2 * order_ + 1;
    const std::size_t n = dim();
    std::vector<double> g(n, 0.0);
    MultiIndex k(n, -static_cast<int>(order_));
    for (std::size_t i = 0; i < coefficients_.size(); ++i, advance(k, static_cast<int>(order_))) {
        if (coefficients_[i] == Complex{}) continue;
        Complex term = coefficients_[i];
        for (std::size_t d = 0; d < n; ++d) term *= table[d * side + static_cast<std::size_t>(k[d] + static_cast<int>(order_))];
        // d/dx_d of exp(j k.w x') is j k_d w_d exp(...); Re(j z) = -Im z.
        for (std::size_t d = 0; d < n; ++d) g[d] -= k[d] * omega_[d] * term.imag();
    }
    return g;
}

std::vector<double> FourierSurrogate::hessian(std::span<const double> x) const {
    require_dim(x, dim(), "FourierSurrogate::hessian");
    const auto table = phase_table(x);
    const std::size_t side = 2 * order_ + 1;
    const std::size_t n = dim();
    std::vector<double> h(n * n, 0.0);
    MultiIndex k(n, -static_cast<int>(order_));
    for (std::size_t i = 0; i < coefficients_.size(); ++i, advance(k, static_cast<int>(order_))) {
        if (coefficients_[i] == Complex{}) continue;
        Complex term = coefficients_[i];
        for (std::size_t d = 0; d < n; ++d) term *= table[d * side + static_cast<std::size_t>(k[d] + static_cast<int>(order_))];
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) h[a * n + b] -= k[a] * omega_[a] * k[b] * omega_[b] * term.real();
        }
    }
    return h;
}

Grid2D FourierSurrogate::evaluate_grid(const GridAxis& x_axis, const GridAxis& y_axis) const {
    if (dim() != 2) throw InvalidInput("evaluate_grid requires a two-dimensional surrogate");
    const std::size_t side = 2 * order_ + 1;
    const int m = static_cast<int>(order_);
    // F = Re(Ey^T A Ex) with A(k1, k0) = a_k, Ex(k0, c) = exp(j k0 w0 x_c').
    Eigen::MatrixXcd a(side, side);
    for (std::size_t k1 = 0; k1 < side; ++k1) {
        for (std::size_t k0 = 0; k0 < side; ++k0) a(k1, k0) = coefficients_[k1 * side + k0];
    }
    auto phases = [&](const GridAxis& axis, std::size_t d) {
        Eigen::MatrixXcd e(side, axis.count);
        for (std::size_t c = 0; c < axis.count; ++c) {
            const double theta = omega_[d] * (axis.coord(c) - origin_[d]);
            for (int kd = -m; kd <= m; ++kd) e(kd + m, c) = std::polar(1.0, kd * theta);
        }
        return e;
    };
    const Eigen::MatrixXcd ex = phases(x_axis, 0);
    const Eigen::MatrixXcd ey = phases(y_axis, 1);
    const Eigen::MatrixXcd values = ey.transpose() * (a * ex);
    Grid2D out(y_axis.count, x_axis.count);
    for (std::size_t r = 0; r < y_axis.count; ++r) {
        for (std::size_t c = 0; c < x_axis.count; ++c) out(r, c) = values(r, c).real();
    }
    return out;
}

ScalarField FourierSurrogate::as_field() const {
    return [s = *this](std::span<const double> x) { return s.evaluate(x); };
}

// ---------------------------------------------------------------------------

FourierSurrogate estimate_coefficients_mc(const SampleSet& samples, std::size_t order, const Domain& domain,
                                          double period_factor) {
    check_samples(samples, domain, "estimate_coefficients_mc");
    FourierSurrogate s(order, domain, period_factor);
    const std::size_t n = domain.dim();
    const int m = static_cast<int>(order);
    const std::size_t side = 2 * order + 1;
    const double inv_n = 1.0 / static_cast<double>(samples.size());
    auto& coeffs = s.coefficients();
    for (const auto& sample : samples) {
        // exp(-j k.w x') factorises over dimensions.
        std::vector<Complex> table(side * n);
        for (std::size_t d = 0; d < n; ++d) {
            const double theta = s.omega()[d] * (sample.location[d] - s.origin()[d]);
            for (int kd = -m; kd <= m; ++kd) table[d * side + static_cast<std::size_t>(kd + m)] = std::polar(1.0, -kd * theta);
        }
        MultiIndex k(n, -m);
        for (std::size_t i = 0; i < coeffs.size(); ++i, advance(k, m)) {
            Complex e = sample.value * inv_n;
            for (std::size_t d = 0; d < n; ++d) e *= table[d * side + static_cast<std::size_t>(k[d] + m)];
            coeffs[i] += e;
        }
    }
    // Real data gives a_{-k} = conj(a_k) analytically; make it exact in floating point.
    std::vector<Complex> sym = coeffs;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        MultiIndex k = s.index_of(i);
        for (auto& kd : k) kd = -kd;
        sym[i] = 0.5 * (coeffs[i] + std::conj(coeffs[s.flat_of(k)]));
    }
    coeffs = std::move(sym);
    return s;
}

FourierSurrogate fit_coefficients_ls(const SampleSet& samples, std::size_t order, const Domain& domain,
                                     const FitOptions& options) {
    check_samples(samples, domain, "fit_coefficients_ls");
    if (!(options.ridge >= 0.0) || !std::isfinite(options.ridge)) throw InvalidInput("ridge must be finite and >= 0");
    if (!(options.smoothness >= 0.0)) throw InvalidInput("smoothness exponent must be >= 0");
    FourierSurrogate s(order, domain, options.period_factor);
    const std::size_t n = domain.dim();
    const int m = static_cast<int>(order);

    // Real unknowns: a_0 (real) and (Re a_k, Im a_k) for k in the half set.
    std::vector<std::size_t> half;
    std::vector<MultiIndex> half_k;
    std::size_t zero_flat = 0;
    {
        MultiIndex k(n, -m);
        for (std::size_t i = 0; i < s.term_count(); ++i, advance(k, m)) {
            if (std::all_of(k.begin(), k.end(), [](int v) { return v == 0; })) {
                zero_flat = i;
            } else if (in_half_set(k)) {
                half.push_back(i);
                half_k.push_back(k);
            }
        }
    }
    const auto cols = static_cast<Eigen::Index>(1 + 2 * half.size());
    const auto rows_data = static_cast<Eigen::Index>(samples.size());
    const bool regularised = options.ridge > 0.0;
    const Eigen::Index rows = rows_data + (regularised ? cols : 0);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index r = 0; r < rows_data; ++r) {
        const auto& sample = samples[static_cast<std::size_t>(r)];
        std::vector<double> theta(n);
        for (std::size_t d = 0; d < n; ++d) theta[d] = s.omega()[d] * (sample.location[d] - s.origin()[d]);
        a(r, 0) = 1.0;
        for (std::size_t h = 0; h < half.size(); ++h) {
            double phase = 0.0;
            for (std::size_t d = 0; d < n; ++d) phase += half_k[h][d] * theta[d];
            // a_k e^{j phase} + conj(a_k) e^{-j phase} = 2 Re(a_k) cos - 2 Im(a_k) sin.
            a(r, static_cast<Eigen::Index>(1 + 2 * h)) = 2.0 * std::cos(phase);
            a(r, static_cast<Eigen::Index>(2 + 2 * h)) = -2.0 * std::sin(phase);
        }
        b(r) = sample.value;
    }
    if (regularised) {
        // ridge * sum over the full cube: a_0 once, each half-set pair twice.
        a(rows_data, 0) = std::sqrt(options.ridge * sobolev_weight(MultiIndex(n, 0), options.smoothness));
        for (std::size_t h = 0; h < half.size(); ++h) {
            const double w = std::sqrt(2.0 * options.ridge * sobolev_weight(half_k[h], options.smoothness));
            const auto c = static_cast<Eigen::Index>(1 + 2 * h);
            a(rows_data + c, c) = w;
            a(rows_data + c + 1, c + 1) = w;
        }
    }

    Eigen::VectorXd x;
    if (regularised) {
        x = a.householderQr().solve(b);
    } else {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        qr.setThreshold(1e-10);
        if (qr.rank() < cols) {
            throw IllConditioned("least-squares system is rank deficient (rank " + std::to_string(qr.rank()) + " of " +
                                 std::to_string(cols) + "); raise the ridge or add samples");
        }
        x = qr.solve(b);
    }

    auto& coeffs = s.coefficients();
    coeffs[zero_flat] = Complex(x(0), 0.0);
    for (std::size_t h = 0; h < half.size(); ++h) {
        const Complex ak(x(static_cast<Eigen::Index>(1 + 2 * h)), x(static_cast<Eigen::Index>(2 + 2 * h)));
        coeffs[half[h]] = ak;
        MultiIndex neg = half_k[h];
        for (auto& kd : neg) kd = -kd;
        coeffs[s.flat_of(neg)] = std::conj(ak);
    }
    return s;
}

double ls_objective(const FourierSurrogate& s, const SampleSet& samples, const FitOptions& options) {
    double obj = 0.0;
    for (const auto& sample : samples) {
        const double r = s.evaluate(sample.location) - sample.value;
        obj += r * r;
    }
    if (options.ridge > 0.0) {
        double pen = 0.0;
        for (std::size_t i = 0; i < s.term_count(); ++i) {
            pen += sobolev_weight(s.index_of(i), options.smoothness) * std::norm(s.coefficients()[i]);
        }
        obj += options.ridge * pen;
    }
    return obj;
}

// ---------------------------------------------------------------------------

ErrorReport approximation_error(const FourierSurrogate& s, const ScalarField& truth, std::size_t resolution,
                                std::size_t n_samples) {
    if (resolution < 2) throw InvalidInput("approximation_error: resolution must be >= 2 per dimension");
    if (!truth) throw InvalidInput("approximation_error: truth function is empty");
    const std::size_t n = s.dim();
    const auto& dom = s.domain();

    std::vector<double> truth_vals;
    std::vector<double> surr_vals;
    if (n == 2) {
        const GridAxis xa{dom[0].lo, dom[0].hi, resolution};
        const GridAxis ya{dom[1].lo, dom[1].hi, resolution};
        const Grid2D g = s.evaluate_grid(xa, ya);
        surr_vals.assign(g.values().begin(), g.values().end());
        truth_vals.reserve(g.size());
        for (std::size_t r = 0; r < resolution; ++r) {
            for (std::size_t c = 0; c < resolution; ++c) {
                const double p[2] = {xa.coord(c), ya.coord(r)};
                truth_vals.push_back(truth(p));
            }
        }
    } else {
        const std::size_t total = ipow(resolution, n);
        truth_vals.reserve(total);
        surr_vals.reserve(total);
        std::vector<GridAxis> axes;
        for (std::size_t d = 0; d < n; ++d) axes.push_back({dom[d].lo, dom[d].hi, resolution});
        Point x(n);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t rem = flat;
            for (std::size_t d = 0; d < n; ++d) {
                x[d] = axes[d].coord(rem % resolution);
                rem /= resolution;
            }
            truth_vals.push_back(truth(x));
            surr_vals.push_back(s.evaluate(x));
        }
    }

    const double count = static_cast<double>(truth_vals.size());
    double mean = 0.0;
    for (double t : truth_vals) mean += t;
    mean /= count;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double ss_tot = 0.0;
    double worst = 0.0;
    for (std::size_t i = 0; i < truth_vals.size(); ++i) {
        const double e = truth_vals[i] - surr_vals[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
        worst = std::max(worst, std::abs(e));
        const double dt = truth_vals[i] - mean;
        ss_tot += dt * dt;
    }
    ErrorReport rep;
    rep.mae = abs_sum / count;
    rep.mse = sq_sum / count;
    rep.max_abs_error = worst;
    if (ss_tot > 0.0) rep.r_squared = 1.0 - sq_sum / ss_tot;
    rep.n_samples = n_samples;
    rep.resolution = resolution;
    return rep;
}

SampleSet grid_samples(const Domain& domain, std::size_t per_dim, const ScalarField& f) {
    if (per_dim < 2) throw InvalidInput("grid_samples: need at least 2 nodes per dimension");
    const std::size_t n = domain.dim();
    const std::size_t total = ipow(per_dim, n);
    SampleSet out;
    Point x(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rem = flat;
        for (std::size_t d = 0; d < n; ++d) {
            x[d] = GridAxis{domain[d].lo, domain[d].hi, per_dim}.coord(rem % per_dim);
            rem /= per_dim;
        }
        out.add({x, f(x), GridTag{}});
    }
    return out;
}

}  // namespace surroflow
