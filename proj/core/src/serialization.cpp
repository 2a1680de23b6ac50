#include "surroflow/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace surroflow {

namespace {

Json point_to_json(const Point& p) { return Json(p); }

std::string provenance_detail(const Provenance& p) {
    if (const auto* c = std::get_if<CircleTag>(&p)) {
        std::ostringstream os;
        os << c->iteration << ',' << format_number(c->radius, 17);
        return os.str();
    }
    return ",";
}

}  // namespace

Json domain_to_json(const Domain& d) {
    Json j = Json::array();
    for (const auto& iv : d.intervals()) j.push_back({iv.lo, iv.hi});
    return j;
}

Domain domain_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw InvalidInput("domain must be a non-empty array of [lo, hi] pairs");
    std::vector<Interval> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw InvalidInput("domain entries must be [lo, hi] number pairs");
        }
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return Domain(std::move(out));
}

Json surrogate_to_json(const FourierSurrogate& s) {
    Json coeffs = Json::array();
    for (std::size_t i = 0; i < s.term_count(); ++i) {
        const auto& a = s.coefficients()[i];
        coeffs.push_back({s.index_of(i), a.real(), a.imag()});
    }
    return {{"order", s.order()},
            {"period_factor", s.period_factor()},
            {"domain", domain_to_json(s.domain())},
            {"omega", s.omega()},
            {"coefficients", std::move(coeffs)}};
}

FourierSurrogate surrogate_from_json(const Json& j) {
    try {
        const auto order = j.at("order").get<std::size_t>();
        const double pf = j.contains("period_factor") ? j.at("period_factor").get<double>() : 1.0;
        FourierSurrogate s(order, domain_from_json(j.at("domain")), pf);
        const auto& coeffs = j.at("coefficients");
        if (!coeffs.is_array() || coeffs.size() != s.term_count()) {
            throw InvalidInput("surrogate JSON must list exactly (2M+1)^n coefficients");
        }
        for (const auto& e : coeffs) {
            const auto k = e.at(0).get<std::vector<int>>();
            s.coefficient(k) = Complex(e.at(1).get<double>(), e.at(2).get<double>());
        }
        return s;
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed surrogate JSON: ") + e.what());
    }
}

Json error_report_to_json(const ErrorReport& r) {
    Json j{{"mae", r.mae},
           {"mse", r.mse},
           {"max_abs_error", r.max_abs_error},
           {"n_samples", r.n_samples},
           {"resolution", r.resolution}};
    j["r_squared"] = r.r_squared ? Json(*r.r_squared) : Json(nullptr);
    j["degenerate"] = r.degenerate();
    return j;
}

Json candidate_to_json(const Candidate& c) {
    Json j{{"location", point_to_json(c.location)},
           {"surrogate_value", c.surrogate_value},
           {"iteration", c.iteration},
           {"peak_curvature", c.peak_curvature},
           {"sense", std::string(to_string(c.sense))},
           {"cell", {c.row, c.col}}};
    j["true_value"] = c.true_value ? Json(*c.true_value) : Json(nullptr);
    return j;
}

Json optimize_result_to_json(const OptimizeResult& r) {
    Json cands = Json::array();
    for (const auto& c : r.candidates) cands.push_back(candidate_to_json(c));
    return {{"status", r.status == OptimizeStatus::kFound ? "found" : "no-candidates"},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"detections", r.detections.size()},
            {"candidates", std::move(cands)}};
}

std::string trace_to_jsonl(const std::vector<TraceRecord>& trace) {
    std::string out;
    for (const auto& t : trace) {
        const Json j{{"iteration", t.iteration},
                     {"location", point_to_json(t.location)},
                     {"true_value", t.true_value},
                     {"surrogate_value", t.surrogate_value},
                     {"accepted", t.accepted},
                     {"radius", t.radius}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::string samples_to_csv(const SampleSet& samples) {
    std::ostringstream os;
    for (std::size_t d = 0; d < samples.dim(); ++d) os << 'x' << d << ',';
    os << "value,provenance,iteration,radius\n";
    for (const auto& s : samples) {
        for (double v : s.location) os << format_number(v, 17) << ',';
        os << format_number(s.value, 17) << ',' << provenance_name(s.provenance) << ',' << provenance_detail(s.provenance)
           << '\n';
    }
    return os.str();
}

std::string_view to_string(GridFormat f) noexcept { return f == GridFormat::kCsv ? "csv" : "binary"; }

GridFormat grid_format_from_string(std::string_view text) {
    if (text == "csv") return GridFormat::kCsv;
    if (text == "binary") return GridFormat::kBinary;
    throw InvalidInput("grid format must be \"csv\" or \"binary\"");
}

std::filesystem::path write_grid(const std::filesystem::path& stem, const Grid2D& grid, const GridAxis& x,
                                 const GridAxis& y, double t, GridFormat format) {
    std::filesystem::path data = stem;
    data += format == GridFormat::kCsv ? ".csv" : ".bin";
    if (format == GridFormat::kCsv) {
        std::ostringstream os;
        for (std::size_t r = 0; r < grid.rows(); ++r) {
            for (std::size_t c = 0; c < grid.cols(); ++c) {
                if (c) os << ',';
                os << format_number(grid(r, c), 17);
            }
            os << '\n';
        }
        write_text_file(data, os.str());
    } else {
        std::string bytes(grid.size() * sizeof(double), '\0');
        for (std::size_t i = 0; i < grid.size(); ++i) {
            auto bits = std::bit_cast<std::uint64_t>(grid.values()[i]);
            if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
            std::memcpy(bytes.data() + i * sizeof(double), &bits, sizeof(double));
        }
        write_text_file(data, bytes);
    }
    const Json sidecar{{"shape", {grid.rows(), grid.cols()}},
                       {"domain", {{x.lo, x.hi}, {y.lo, y.hi}}},
                       {"t", t},
                       {"format", std::string(to_string(format))},
                       {"layout", "row-major; rows follow y, columns follow x"},
                       {"dtype", format == GridFormat::kCsv ? "decimal" : "float64-le"}};
    std::filesystem::path side = stem;
    side += ".json";
    write_text_file(side, sidecar.dump(2) + "\n");
    return data;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string format_number(double v, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

}  // namespace surroflow
