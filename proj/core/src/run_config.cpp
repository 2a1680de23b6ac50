#include "surroflow/run_config.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace surroflow {

namespace {

/// Walks one JSON object, tracking consumed keys so leftovers can be reported.
class ObjectReader {
public:
    ObjectReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(where() + "expected an object");
    }

    const Json* find(const char* key) {
        seen_.insert(key);
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    void number(const char* key, double& out) {
        if (const Json* v = find(key)) out = as_number(*v, key);
    }
    void optional_number(const char* key, std::optional<double>& out) {
        if (const Json* v = find(key)) out = v->is_null() ? std::nullopt : std::optional<double>(as_number(*v, key));
    }
    void count(const char* key, std::size_t& out) {
        if (const Json* v = find(key)) out = static_cast<std::size_t>(as_unsigned(*v, key));
    }
    void seed(const char* key, std::uint64_t& out) {
        if (const Json* v = find(key)) out = as_unsigned(*v, key);
    }
    void integer(const char* key, int& out) {
        if (const Json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
            const auto x = v->get<long long>();
            if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(field(key) + ": integer out of range");
            out = static_cast<int>(x);
        }
    }
    void boolean(const char* key, bool& out) {
        if (const Json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
            out = v->get<bool>();
        }
    }
    void string(const char* key, std::string& out) {
        if (const Json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }
    void numbers(const char* key, std::vector<double>& out) {
        if (const Json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(field(key) + ": expected an array of numbers");
            out.clear();
            for (const auto& e : *v) out.push_back(as_number(e, key));
        }
    }
    void counts(const char* key, std::vector<std::size_t>& out) {
        if (const Json* v = find(key)) {
            if (!v->is_array()) throw ConfigError(field(key) + ": expected an array of non-negative integers");
            out.clear();
            for (const auto& e : *v) out.push_back(static_cast<std::size_t>(as_unsigned(e, key)));
        }
    }
    template <typename Fn>
    void enumerated(const char* key, Fn&& convert) {
        if (const Json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
            try {
                convert(v->get<std::string>());
            } catch (const InvalidInput& e) {
                throw ConfigError(field(key) + ": " + e.what());
            }
        }
    }
    void domain(const char* key, std::optional<Domain>& out) {
        if (const Json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            try {
                out = domain_from_json(*v);
            } catch (const InvalidInput& e) {
                throw ConfigError(field(key) + ": " + e.what());
            }
        }
    }
    template <typename Fn>
    void object(const char* key, Fn&& body) {
        if (const Json* v = find(key)) {
            ObjectReader sub(*v, field(key));
            body(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + field(it.key().c_str()) + "'");
        }
    }

private:
    std::string field(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }
    std::string where() const { return path_.empty() ? std::string("top level: ") : path_ + ": "; }

    double as_number(const Json& v, const char* key) const {
        if (!v.is_number()) throw ConfigError(field(key) + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key) + ": expected a finite number");
        return x;
    }
    std::uint64_t as_unsigned(const Json& v, const char* key) const {
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
        throw ConfigError(field(key) + ": expected a non-negative integer");
    }

    const Json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string line_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void read_fit(ObjectReader& r, FitOptions& fit) {
    r.number("ridge", fit.ridge);
    r.number("smoothness", fit.smoothness);
    r.number("period_factor", fit.period_factor);
}

Json fit_json(const FitOptions& fit) {
    return {{"ridge", fit.ridge}, {"smoothness", fit.smoothness}, {"period_factor", fit.period_factor}};
}

std::string_view noise_kind_name(NoiseKind k) { return k == NoiseKind::kNone ? "none" : "additive-gaussian"; }

std::string_view sampling_name(DecaySampling s) { return s == DecaySampling::kUniformRandom ? "uniform-random" : "uniform-grid"; }

std::string_view fit_path_name(FitPath f) { return f == FitPath::kLeastSquares ? "least-squares" : "monte-carlo"; }

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string_view to_string(SurrogateMode m) noexcept {
    return m == SurrogateMode::kStochastic ? "stochastic" : "deterministic";
}

void RunConfig::validate() const {
    auto wrap = [](const char* prefix, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string(prefix) + e.what());
        }
    };
    BenchmarkSpec spec = [&] {
        try {
            return benchmark_by_name(benchmark);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("benchmark: ") + e.what());
        }
    }();
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise.sigma: must be >= 0");
    wrap("", [&] { algorithm1.validate(); });
    wrap("", [&] { dense.validate(); });
    wrap("", [&] { flow.validate(); });
    if (spec.dim() != 2) throw ConfigError("benchmark: the optimisation pipeline requires a two-dimensional benchmark");
    if (output_dir.empty()) throw ConfigError("output_dir: must not be empty");
    if (!(hybrid.shrink > 0.0 && hybrid.shrink <= 1.0)) throw ConfigError("hybrid.shrink: must lie in (0, 1]");
    if (hybrid.order == 0) throw ConfigError("hybrid.order: must be >= 1");
    if (hybrid.points_per_circle == 0) throw ConfigError("hybrid.points_per_circle: must be >= 1");
    if (!(hybrid.fit.ridge >= 0.0)) throw ConfigError("hybrid.ridge: must be >= 0");
    if (!(hybrid.fit.smoothness >= 0.0)) throw ConfigError("hybrid.smoothness: must be >= 0");
    if (!(hybrid.fit.period_factor >= 1.0)) throw ConfigError("hybrid.period_factor: must be >= 1");
    if (hybrid.zoom && hybrid.zoom->dim() != spec.dim()) throw ConfigError("hybrid.zoom: dimension does not match the benchmark");

    for (const auto* c : {&bounds.c_f, &bounds.c_s, &bounds.c_sigma}) {
        if (*c && !(**c > 0.0)) throw ConfigError("bounds: constants C_F, C_S, C_sigma must be > 0");
    }
    if (!(bounds.s > 0.0)) throw ConfigError("bounds.s: must be > 0");
    if (!(bounds.delta > 0.0 && bounds.delta < 1.0)) throw ConfigError("bounds.delta: must lie in (0, 1)");
    if (bounds.gap && !(*bounds.gap >= 0.0)) throw ConfigError("bounds.gap: must be >= 0");
    if (bounds.lipschitz && !(*bounds.lipschitz >= 0.0)) throw ConfigError("bounds.lipschitz: must be >= 0");
    if (bounds.sizes.empty()) throw ConfigError("bounds.sizes: must not be empty");
    for (auto n : bounds.sizes) {
        if (n == 0) throw ConfigError("bounds.sizes: entries must be >= 1");
    }
    if (bounds.empirical) {
        if (bounds.sizes.size() < 3) throw ConfigError("bounds.sizes: the empirical check needs at least 3 sizes");
        if (!(bounds.decay.sigma >= 0.0)) throw ConfigError("bounds.empirical.sigma: must be >= 0");
        if (bounds.decay.resolution < 2) throw ConfigError("bounds.empirical.resolution: must be >= 2");
        if (!(bounds.decay.fit.period_factor >= 1.0)) throw ConfigError("bounds.empirical.period_factor: must be >= 1");
        if (!(bounds.decay.fit.ridge >= 0.0)) throw ConfigError("bounds.empirical.ridge: must be >= 0");
    }
}

RunConfig parse_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        std::string msg = e.what();
        // Drop the library's "[json.exception.parse_error.101] parse error at ..." prefix.
        if (const auto pos = msg.find(": syntax error"); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw ConfigError("parse error at " + line_column(text, e.byte) + ": " + msg);
    }

    RunConfig cfg;
    ObjectReader top(doc, "");
    top.string("benchmark", cfg.benchmark);
    top.seed("seed", cfg.seed);
    top.enumerated("sense", [&](const std::string& s) { cfg.sense = sense_from_string(s); });
    top.enumerated("mode", [&](const std::string& s) {
        if (s == "stochastic") {
            cfg.mode = SurrogateMode::kStochastic;
        } else if (s == "deterministic") {
            cfg.mode = SurrogateMode::kDeterministic;
        } else {
            throw InvalidInput("must be \"stochastic\" or \"deterministic\"");
        }
    });
    std::string out_dir = cfg.output_dir.string();
    top.string("output_dir", out_dir);
    cfg.output_dir = out_dir;
    top.boolean("emit_grids", cfg.emit_grids);
    top.enumerated("grid_format", [&](const std::string& s) { cfg.grid_format = grid_format_from_string(s); });

    top.object("noise", [&](ObjectReader& r) {
        r.enumerated("kind", [&](const std::string& s) {
            if (s == "none") {
                cfg.noise_kind = NoiseKind::kNone;
            } else if (s == "additive-gaussian") {
                cfg.noise_kind = NoiseKind::kAdditiveGaussian;
            } else {
                throw InvalidInput("must be \"none\" or \"additive-gaussian\"");
            }
        });
        r.number("sigma", cfg.noise_sigma);
    });

    top.object("algorithm1", [&](ObjectReader& r) {
        auto& a = cfg.algorithm1;
        r.count("order", a.order);
        r.number("alpha", a.alpha);
        r.numbers("radii", a.radii);
        r.number("radius_increment", a.radius_increment);
        r.count("circle_divisions", a.circle_divisions);
        r.count("points_per_circle", a.points_per_circle);
        r.count("max_iterations", a.max_iterations);
        read_fit(r, a.fit);
        r.count("geodesic_resolution", a.geodesic.resolution);
        r.integer("stencil_radius", a.geodesic.stencil_radius);
        r.count("rays", a.geodesic.rays);
        r.count("error_resolution", a.error_resolution);
    });

    top.object("dense", [&](ObjectReader& r) {
        r.count("order", cfg.dense.order);
        r.count("grid", cfg.dense.per_dim);
        read_fit(r, cfg.dense.fit);
        r.count("error_resolution", cfg.dense.error_resolution);
    });

    top.object("flow", [&](ObjectReader& r) {
        auto& f = cfg.flow;
        r.number("dt", f.dt);
        r.count("iterations", f.iterations);
        if (const Json* v = r.find("resolution")) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number_unsigned() || !(*v)[1].is_number_unsigned()) {
                throw ConfigError("flow.resolution: expected [nx, ny] non-negative integers");
            }
            f.nx = (*v)[0].get<std::size_t>();
            f.ny = (*v)[1].get<std::size_t>();
        }
        r.number("convergence_threshold", f.convergence_threshold);
        r.number("blowup_threshold", f.blowup_threshold);
        r.number("beta", f.beta);
        r.number("initial_curvature_fraction", f.initial_curvature_fraction);
        r.integer("freeze_radius", f.freeze_radius);
        r.count("max_candidates", f.max_candidates);
        r.number("filter_level", f.filter_level);
        r.count("max_forward_substeps", f.max_forward_substeps);
        r.boolean("subcell_refine", f.subcell_refine);
        r.count("plot_interval", f.plot_interval);
    });

    top.object("hybrid", [&](ObjectReader& r) {
        auto& h = cfg.hybrid;
        r.boolean("enabled", h.enabled);
        r.number("shrink", h.shrink);
        r.domain("zoom", h.zoom);
        r.count("order", h.order);
        r.count("points_per_circle", h.points_per_circle);
        read_fit(r, h.fit);
    });

    top.object("bounds", [&](ObjectReader& r) {
        auto& b = cfg.bounds;
        r.optional_number("c_f", b.c_f);
        r.optional_number("c_s", b.c_s);
        r.optional_number("c_sigma", b.c_sigma);
        r.number("s", b.s);
        r.number("delta", b.delta);
        r.optional_number("lipschitz", b.lipschitz);
        r.optional_number("gap", b.gap);
        r.counts("sizes", b.sizes);
        r.enumerated("truncation", [&](const std::string& s) { b.truncation = truncation_mode_from_string(s); });
        r.object("empirical", [&](ObjectReader& e) {
            auto& d = b.decay;
            e.boolean("enabled", b.empirical);
            e.count("order", d.order);
            e.number("sigma", d.sigma);
            e.enumerated("sampling", [&](const std::string& s) {
                if (s == "uniform-random") {
                    d.sampling = DecaySampling::kUniformRandom;
                } else if (s == "uniform-grid") {
                    d.sampling = DecaySampling::kUniformGrid;
                } else {
                    throw InvalidInput("must be \"uniform-random\" or \"uniform-grid\"");
                }
            });
            e.enumerated("fit_path", [&](const std::string& s) {
                if (s == "least-squares") {
                    d.fit_path = FitPath::kLeastSquares;
                } else if (s == "monte-carlo") {
                    d.fit_path = FitPath::kMonteCarlo;
                } else {
                    throw InvalidInput("must be \"least-squares\" or \"monte-carlo\"");
                }
            });
            e.count("resolution", d.resolution);
            read_fit(e, d.fit);
        });
    });
    top.finish();

    cfg.bounds.decay.s = cfg.bounds.s;
    cfg.bounds.decay.delta = cfg.bounds.delta;
    cfg.bounds.decay.mode = cfg.bounds.truncation;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text);
}

Json config_to_json(const RunConfig& cfg) {
    const auto& a = cfg.algorithm1;
    const auto& f = cfg.flow;
    const auto& h = cfg.hybrid;
    const auto& b = cfg.bounds;
    Json alg = {{"order", a.order},
                {"alpha", a.alpha},
                {"radii", a.radii},
                {"radius_increment", a.radius_increment},
                {"circle_divisions", a.circle_divisions},
                {"points_per_circle", a.points_per_circle},
                {"max_iterations", a.max_iterations},
                {"geodesic_resolution", a.geodesic.resolution},
                {"stencil_radius", a.geodesic.stencil_radius},
                {"rays", a.geodesic.rays},
                {"error_resolution", a.error_resolution}};
    alg.update(fit_json(a.fit));
    Json dense = {{"order", cfg.dense.order}, {"grid", cfg.dense.per_dim}, {"error_resolution", cfg.dense.error_resolution}};
    dense.update(fit_json(cfg.dense.fit));
    Json flow = {{"dt", f.dt},
                 {"iterations", f.iterations},
                 {"resolution", {f.nx, f.ny}},
                 {"convergence_threshold", f.convergence_threshold},
                 {"blowup_threshold", f.blowup_threshold},
                 {"beta", f.beta},
                 {"initial_curvature_fraction", f.initial_curvature_fraction},
                 {"freeze_radius", f.freeze_radius},
                 {"max_candidates", f.max_candidates},
                 {"filter_level", f.filter_level},
                 {"max_forward_substeps", f.max_forward_substeps},
                 {"subcell_refine", f.subcell_refine},
                 {"plot_interval", f.plot_interval}};
    Json hybrid = {{"enabled", h.enabled},
                   {"shrink", h.shrink},
                   {"zoom", h.zoom ? domain_to_json(*h.zoom) : Json(nullptr)},
                   {"order", h.order},
                   {"points_per_circle", h.points_per_circle}};
    hybrid.update(fit_json(h.fit));
    Json empirical = {{"enabled", b.empirical},
                      {"order", b.decay.order},
                      {"sigma", b.decay.sigma},
                      {"sampling", std::string(sampling_name(b.decay.sampling))},
                      {"fit_path", std::string(fit_path_name(b.decay.fit_path))},
                      {"resolution", b.decay.resolution}};
    empirical.update(fit_json(b.decay.fit));
    Json bounds = {{"c_f", optional_json(b.c_f)},
                   {"c_s", optional_json(b.c_s)},
                   {"c_sigma", optional_json(b.c_sigma)},
                   {"s", b.s},
                   {"delta", b.delta},
                   {"lipschitz", optional_json(b.lipschitz)},
                   {"gap", optional_json(b.gap)},
                   {"sizes", b.sizes},
                   {"truncation", std::string(to_string(b.truncation))},
                   {"empirical", std::move(empirical)}};
    return {{"benchmark", cfg.benchmark},
            {"seed", cfg.seed},
            {"sense", std::string(to_string(cfg.sense))},
            {"mode", std::string(to_string(cfg.mode))},
            {"output_dir", cfg.output_dir.string()},
            {"emit_grids", cfg.emit_grids},
            {"grid_format", std::string(to_string(cfg.grid_format))},
            {"noise", {{"kind", std::string(noise_kind_name(cfg.noise_kind))}, {"sigma", cfg.noise_sigma}}},
            {"algorithm1", std::move(alg)},
            {"dense", std::move(dense)},
            {"flow", std::move(flow)},
            {"hybrid", std::move(hybrid)},
            {"bounds", std::move(bounds)}};
}

std::string serialize_config(const RunConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

bool operator==(const RunConfig& a, const RunConfig& b) { return config_to_json(a) == config_to_json(b); }

SeedPlan seed_plan(std::uint64_t master) noexcept {
    return {derive_seed(master, 1), derive_seed(master, 2), derive_seed(master, 3),
            derive_seed(master, 4), derive_seed(master, 5), derive_seed(master, 6)};
}

Json seed_plan_to_json(const SeedPlan& p) {
    return {{"noise", p.noise},       {"circles", p.circles},         {"ranking", p.ranking},
            {"hybrid_noise", p.hybrid_noise}, {"hybrid_circles", p.hybrid_circles}, {"decay", p.decay}};
}

}  // namespace surroflow
