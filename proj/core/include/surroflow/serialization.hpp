#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "surroflow/algorithm1.hpp"
#include "surroflow/fourier_surrogate.hpp"
#include "surroflow/ricci_flow.hpp"

namespace surroflow {

using Json = nlohmann::json;

/// [[lo, hi], ...]
Json domain_to_json(const Domain& d);
Domain domain_from_json(const Json& j);

/// {order, period_factor, domain, omega, coefficients: [[k...], re, im]}.
/// Doubles are written in shortest round-trip form, so reading back is bit-exact.
Json surrogate_to_json(const FourierSurrogate& s);
FourierSurrogate surrogate_from_json(const Json& j);

Json error_report_to_json(const ErrorReport& r);
Json candidate_to_json(const Candidate& c);
/// {status, iterations, converged, candidates: [...]} (no timing data).
Json optimize_result_to_json(const OptimizeResult& r);

/// One JSON object per line.
std::string trace_to_jsonl(const std::vector<TraceRecord>& trace);
/// location columns, value, provenance (plus iteration and radius for circle samples).
std::string samples_to_csv(const SampleSet& samples);

enum class GridFormat { kCsv, kBinary };
std::string_view to_string(GridFormat f) noexcept;
GridFormat grid_format_from_string(std::string_view text);

/// Writes `<stem>.csv` (or `<stem>.bin`, little-endian float64, row-major) and a
/// `<stem>.json` sidecar {shape, domain, t, format}. Returns the data file path.
std::filesystem::path write_grid(const std::filesystem::path& stem, const Grid2D& grid, const GridAxis& x,
                                 const GridAxis& y, double t, GridFormat format);

/// Writes text, creating parent directories; throws std::runtime_error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Shortest decimal with at most `digits` significant digits, for CSV output.
std::string format_number(double v, int digits = 10);

}  // namespace surroflow
