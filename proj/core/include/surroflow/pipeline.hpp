#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "surroflow/run_config.hpp"

namespace surroflow {

/// Runtime failure inside one pipeline stage; `stage()` names it.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

enum class PipelineStage {
    /// Surrogate construction only.
    kApproximate,
    /// Surrogate construction, flow optimisation and (if enabled) hybrid refinement.
    kOptimize,
};

struct Timings {
    double surrogate_seconds = 0.0;
    double optimize_seconds = 0.0;
    double hybrid_seconds = 0.0;
    double total_seconds = 0.0;
};

struct RunRecord {
    RunConfig config;
    SeedPlan seeds{};
    Algorithm1Result surrogate_run;
    std::optional<OptimizeResult> optimum;
    std::optional<HybridResult> hybrid;
    Timings timings;
    /// (label, path) of every file written.
    std::vector<std::pair<std::string, std::filesystem::path>> artifacts;

    /// Ranked candidates of the last optimisation stage that ran (hybrid when present).
    const std::vector<Candidate>& final_candidates() const;
    const ErrorReport& final_metrics() const;
};

/// Builds the surrogate (stochastic or dense), optimises it, optionally refines
/// it on a zoomed box, and persists artifacts under cfg.output_dir when
/// write_artifacts is set. Deterministic for a fixed config.
RunRecord run_pipeline(const RunConfig& cfg, PipelineStage stage = PipelineStage::kOptimize,
                       bool write_artifacts = true);

Json run_record_to_json(const RunRecord& record);

/// Evaluates the configured bound over bounds.sizes and, if enabled, the
/// empirical decay check; writes bounds.csv (and decay.csv) under output_dir.
struct BoundsRun {
    std::optional<std::vector<BoundBreakdown>> bound_series;
    std::optional<DecayReport> decay;
    TruncationMode mode = TruncationMode::kSampleCount;
    std::vector<std::pair<std::string, std::filesystem::path>> artifacts;
};

BoundsRun run_bounds(const RunConfig& cfg, bool write_artifacts = true);

/// CSV text of a bound series: N, truncation, e_fourier, e_sampling, e_noise, e_total.
std::string bound_series_csv(const std::vector<BoundBreakdown>& series);
/// CSV text of a decay report: N, measured_mae, measured_max, noisy_mae, noisy_max, bound columns.
std::string decay_csv(const DecayReport& report);

struct TablesResult {
    std::filesystem::path table1;
    std::filesystem::path table2;
    std::size_t failed_rows = 0;
};

/// Runs the five benchmarks in the stochastic and deterministic settings and
/// writes table1.csv (surrogate quality) and table2.csv (located optima), each
/// with the published reference values alongside.
TablesResult reproduce_tables(const std::filesystem::path& out_dir, std::uint64_t seed = 0);

}  // namespace surroflow
