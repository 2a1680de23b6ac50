#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "surroflow/algorithm1.hpp"
#include "surroflow/error_bounds.hpp"
#include "surroflow/ricci_flow.hpp"
#include "surroflow/serialization.hpp"

namespace surroflow {

/// Configuration problems: malformed documents, unknown keys, invalid values.
/// The message carries the line/column or the dotted key path of the problem.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

enum class SurrogateMode {
    /// Adaptive geodesic-circle sampling (build_surrogate) from stochastic samples.
    kStochastic,
    /// Noise-free values on a dense uniform grid, fitted by least squares.
    kDeterministic,
};

std::string_view to_string(SurrogateMode m) noexcept;

struct HybridSettings {
    bool enabled = false;
    /// Zoom box size relative to the original domain, centred on the best candidate.
    double shrink = 0.2;
    /// Explicit zoom box; overrides shrink when set.
    std::optional<Domain> zoom;
    std::size_t order = 5;
    std::size_t points_per_circle = 48;
    FitOptions fit{1e-5, 1.0, 2.0};
};

struct BoundsSettings {
    /// Constants for the bound; all three must be given to evaluate it.
    std::optional<double> c_f;
    std::optional<double> c_s;
    std::optional<double> c_sigma;
    double s = 1.0;
    double delta = 0.05;
    std::optional<double> lipschitz;
    std::optional<double> gap;
    std::vector<std::size_t> sizes{100, 400, 1600, 6400};
    TruncationMode truncation = TruncationMode::kSampleCount;
    bool empirical = false;
    DecayCheckConfig decay;

    bool has_constants() const noexcept { return c_f && c_s && c_sigma; }
};

struct RunConfig {
    std::string benchmark = "booth";
    /// Master seed; per-stage seeds are derived from it.
    std::uint64_t seed = 0;
    Sense sense = Sense::kMin;
    SurrogateMode mode = SurrogateMode::kStochastic;
    NoiseKind noise_kind = NoiseKind::kNone;
    double noise_sigma = 0.0;
    Algorithm1Config algorithm1;
    DenseFitConfig dense;
    FlowConfig flow;
    std::filesystem::path output_dir = "out";
    bool emit_grids = false;
    GridFormat grid_format = GridFormat::kCsv;
    HybridSettings hybrid;
    BoundsSettings bounds;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Strict JSON parse: unknown keys and wrong types are errors; missing keys take defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Complete JSON form (every field, including defaults).
Json config_to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

/// Per-stage seeds fanned out from the master seed.
struct SeedPlan {
    std::uint64_t noise;
    std::uint64_t circles;
    std::uint64_t ranking;
    std::uint64_t hybrid_noise;
    std::uint64_t hybrid_circles;
    std::uint64_t decay;
};

SeedPlan seed_plan(std::uint64_t master) noexcept;
Json seed_plan_to_json(const SeedPlan& plan);

}  // namespace surroflow
