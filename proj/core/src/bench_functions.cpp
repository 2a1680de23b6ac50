#include "surroflow/bench_functions.hpp"

#include <cmath>
#include <numbers>

namespace surroflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rosenbrock(std::span<const double> x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
}

double himmelblau(std::span<const double> x) {
    const double a = x[0] * x[0] + x[1] - 11.0;
    const double b = x[0] + x[1] * x[1] - 7.0;
    return a * a + b * b;
}

double booth(std::span<const double> x) {
    const double a = x[0] + 2.0 * x[1] - 7.0;
    const double b = 2.0 * x[0] + x[1] - 5.0;
    return a * a + b * b;
}

double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(kTwoPi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + std::numbers::e + 20.0;
}

double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(kTwoPi * v);
    return s;
}

Domain square(double lo, double hi) { return Domain({{lo, hi}, {lo, hi}}); }

}  // namespace

std::string_view to_string(Sense sense) noexcept { return sense == Sense::kMin ? "min" : "max"; }

Sense sense_from_string(std::string_view text) {
    if (text == "min") return Sense::kMin;
    if (text == "max") return Sense::kMax;
    throw InvalidInput("sense must be \"min\" or \"max\", got \"" + std::string(text) + "\"");
}

BenchmarkSpec::BenchmarkSpec(std::string name, Domain domain, std::vector<KnownOptimum> optima, ScalarField form)
    : name_(std::move(name)), domain_(std::move(domain)), optima_(std::move(optima)), form_(std::move(form)) {
    if (!form_) throw InvalidInput("benchmark '" + name_ + "' has no analytic form");
    for (const auto& opt : optima_) {
        if (!domain_.contains(opt.location)) throw InvalidInput("known optimum of '" + name_ + "' lies outside its domain");
    }
}

double BenchmarkSpec::operator()(std::span<const double> x) const {
    require_dim(x, dim(), name_.c_str());
    return form_(x);
}

Evaluation BenchmarkSpec::evaluate(std::span<const double> x) const {
    require_dim(x, dim(), name_.c_str());
    return {form_(x), domain_.contains(x)};
}

BenchmarkSpec BenchmarkSpec::with_domain(Domain domain) const {
    std::vector<KnownOptimum> kept;
    for (const auto& opt : optima_) {
        if (domain.contains(opt.location)) kept.push_back(opt);
    }
    return BenchmarkSpec(name_, std::move(domain), std::move(kept), form_);
}

ScalarField BenchmarkSpec::as_field() const {
    return [spec = *this](std::span<const double> x) { return spec(x); };
}

const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names{"rosenbrock", "himmelblau", "booth", "ackley", "rastrigin"};
    return names;
}

BenchmarkSpec benchmark_by_name(std::string_view name) {
    if (name == "rosenbrock") {
        return BenchmarkSpec("rosenbrock", square(-2.0, 2.0), {{{1.0, 1.0}, 0.0}}, rosenbrock);
    }
    if (name == "himmelblau") {
        return BenchmarkSpec("himmelblau", square(-5.0, 5.0),
                             {{{3.0, 2.0}, 0.0},
                              {{-2.805118086952745, 3.131312518250573}, 0.0},
                              {{-3.779310253377747, -3.2831859912861696}, 0.0},
                              {{3.5844283403304917, -1.8481265269644036}, 0.0}},
                             himmelblau);
    }
    if (name == "booth") {
        return BenchmarkSpec("booth", square(-10.0, 10.0), {{{1.0, 3.0}, 0.0}}, booth);
    }
    if (name == "ackley") {
        return BenchmarkSpec("ackley", square(-5.0, 5.0), {{{0.0, 0.0}, 0.0}}, ackley);
    }
    if (name == "rastrigin") {
        return BenchmarkSpec("rastrigin", square(-5.12, 5.12), {{{0.0, 0.0}, 0.0}}, rastrigin);
    }
    throw InvalidInput("unknown benchmark '" + std::string(name) + "'");
}

double eval_benchmark(const BenchmarkSpec& spec, std::span<const double> x) { return spec(x); }

std::vector<KnownOptimum> true_optimum(const BenchmarkSpec& spec, Sense sense) {
    if (sense != Sense::kMin) throw InvalidInput("benchmarks only carry minimisation optima");
    return spec.known_optima();
}

// ---------------------------------------------------------------------------

void NoiseModel::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("noise sigma must be finite and >= 0");
}

std::string provenance_name(const Provenance& p) {
    struct Visitor {
        std::string operator()(const BoundaryTag&) const { return "boundary"; }
        std::string operator()(const MidpointTag&) const { return "midpoint"; }
        std::string operator()(const CircleTag&) const { return "circle"; }
        std::string operator()(const StochasticTag&) const { return "stochastic"; }
        std::string operator()(const GridTag&) const { return "grid"; }
    };
    return std::visit(Visitor{}, p);
}

void SampleSet::add(Sample s) {
    if (!samples_.empty() && s.location.size() != dim()) throw InvalidInput("sample dimension mismatch");
    if (const auto* c = std::get_if<CircleTag>(&s.provenance)) {
        if (c->iteration < last_iteration_) throw InvalidInput("circle iteration indices must be non-decreasing");
        last_iteration_ = c->iteration;
    }
    samples_.push_back(std::move(s));
}

void SampleSet::append(const SampleSet& other) {
    for (const auto& s : other) add(s);
}

bool operator==(const SampleSet& a, const SampleSet& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].location != b[i].location || a[i].value != b[i].value) return false;
        if (a[i].provenance.index() != b[i].provenance.index()) return false;
    }
    return true;
}

NoisyOracle::NoisyOracle(BenchmarkSpec spec, NoiseModel noise)
    : spec_(std::move(spec)), noise_(noise), engine_(noise.seed) {
    noise_.validate();
}

double NoisyOracle::operator()(std::span<const double> x) {
    const double clean = spec_(x);
    if (noise_.kind == NoiseKind::kNone || noise_.sigma == 0.0) return clean;
    return clean + noise_.sigma * gauss_(engine_);
}

SampleSet sample_stochastic(const BenchmarkSpec& spec, std::size_t count, const NoiseModel& noise) {
    if (count == 0) throw InvalidInput("sample_stochastic: count must be >= 1");
    noise.validate();
    // Locations and noise use separate streams so that toggling noise never
    // moves the sample locations.
    std::mt19937_64 loc_engine(derive_seed(noise.seed, 0));
    NoiseModel value_noise = noise;
    value_noise.seed = derive_seed(noise.seed, 1);
    NoisyOracle oracle(spec, value_noise);

    const auto& dom = spec.domain();
    std::vector<std::uniform_real_distribution<double>> axes;
    for (const auto& iv : dom.intervals()) axes.emplace_back(iv.lo, iv.hi);

    SampleSet out;
    for (std::size_t i = 0; i < count; ++i) {
        Point x(dom.dim());
        for (std::size_t d = 0; d < dom.dim(); ++d) x[d] = axes[d](loc_engine);
        const double v = oracle(x);
        out.add({std::move(x), v, StochasticTag{}});
    }
    return out;
}

}  // namespace surroflow
