#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "surroflow/types.hpp"

namespace surroflow {

enum class Sense { kMin, kMax };

std::string_view to_string(Sense sense) noexcept;
Sense sense_from_string(std::string_view text);

struct KnownOptimum {
    Point location;
    double value = 0.0;
};

/// Outcome of a single evaluation; out-of-domain points are evaluated but flagged.
struct Evaluation {
    double value = 0.0;
    bool in_domain = true;
};

class BenchmarkSpec {
public:
    BenchmarkSpec(std::string name, Domain domain, std::vector<KnownOptimum> optima, ScalarField form);

    const std::string& name() const noexcept { return name_; }
    const Domain& domain() const noexcept { return domain_; }
    std::size_t dim() const noexcept { return domain_.dim(); }
    const std::vector<KnownOptimum>& known_optima() const noexcept { return optima_; }

    double operator()(std::span<const double> x) const;
    Evaluation evaluate(std::span<const double> x) const;

    /// Same analytic form over a different box; known optima outside it are dropped.
    BenchmarkSpec with_domain(Domain domain) const;

    ScalarField as_field() const;

private:
    std::string name_;
    Domain domain_;
    std::vector<KnownOptimum> optima_;
    ScalarField form_;
};

/// Names accepted by benchmark_by_name, in the order used for tables.
const std::vector<std::string>& benchmark_names();

/// "rosenbrock", "himmelblau", "booth", "ackley" or "rastrigin" (lowercase).
BenchmarkSpec benchmark_by_name(std::string_view name);

double eval_benchmark(const BenchmarkSpec& spec, std::span<const double> x);

/// Ground-truth optima. Every benchmark here is a minimisation problem; asking
/// for sense = max is rejected.
std::vector<KnownOptimum> true_optimum(const BenchmarkSpec& spec, Sense sense = Sense::kMin);

// ---------------------------------------------------------------------------
// Sampling

enum class NoiseKind { kNone, kAdditiveGaussian };

struct NoiseModel {
    NoiseKind kind = NoiseKind::kNone;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct BoundaryTag {};
struct MidpointTag {};
struct StochasticTag {};
struct GridTag {};
struct CircleTag {
    std::size_t iteration = 0;
    double radius = 0.0;
};

using Provenance = std::variant<BoundaryTag, MidpointTag, CircleTag, StochasticTag, GridTag>;

std::string provenance_name(const Provenance& p);

struct Sample {
    Point location;
    double value = 0.0;
    Provenance provenance;
};

/// Ordered collection of observations. Circle iteration indices never decrease
/// in insertion order.
class SampleSet {
public:
    SampleSet() = default;

    void add(Sample s);
    void append(const SampleSet& other);

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    std::size_t dim() const noexcept { return samples_.empty() ? 0 : samples_.front().location.size(); }

    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    auto begin() const noexcept { return samples_.begin(); }
    auto end() const noexcept { return samples_.end(); }

    friend bool operator==(const SampleSet& a, const SampleSet& b);

private:
    std::vector<Sample> samples_;
    std::size_t last_iteration_ = 0;
};

/// Noisy black-box access to a benchmark. Owns its own random stream; two
/// oracles built from the same NoiseModel return identical sequences.
class NoisyOracle {
public:
    NoisyOracle(BenchmarkSpec spec, NoiseModel noise);

    double operator()(std::span<const double> x);
    const BenchmarkSpec& spec() const noexcept { return spec_; }
    const NoiseModel& noise() const noexcept { return noise_; }

private:
    BenchmarkSpec spec_;
    NoiseModel noise_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// `count` locations drawn uniformly over the domain, values = analytic + noise.
SampleSet sample_stochastic(const BenchmarkSpec& spec, std::size_t count, const NoiseModel& noise);

}  // namespace surroflow
