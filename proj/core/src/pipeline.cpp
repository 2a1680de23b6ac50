#include "surroflow/pipeline.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <sstream>

namespace surroflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <typename Fn>
auto in_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(stage, e.what());
    }
}

struct ArtifactWriter {
    std::filesystem::path root;
    std::vector<std::pair<std::string, std::filesystem::path>>& list;

    void text(const std::string& label, const std::string& name, const std::string& content) {
        const auto path = root / name;
        write_text_file(path, content);
        list.emplace_back(label, path);
    }
    void json(const std::string& label, const std::string& name, const Json& j) { text(label, name, j.dump(2) + "\n"); }
    void grid(const std::string& label, const std::string& stem, const Grid2D& g, const GridAxis& x, const GridAxis& y,
              double t, GridFormat fmt) {
        const auto data = write_grid(root / stem, g, x, y, t, fmt);
        list.emplace_back(label, data);
        auto side = root / stem;
        side += ".json";
        list.emplace_back(label + "-sidecar", side);
    }
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double v) { return format_number(v, 10); }

std::string domain_text(const Domain& d) {
    std::string out;
    for (std::size_t i = 0; i < d.dim(); ++i) {
        if (i) out += "x";
        out += "[" + num(d[i].lo) + "," + num(d[i].hi) + "]";
    }
    return out;
}

std::string optimum_text(const Point& p, double f) {
    std::string out = "((";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += num(p[i]);
    }
    return out + ")," + num(f) + ")";
}

struct PublishedRow {
    const char* name;
    double mae, mse, r2;
    const char* stochastic;
    const char* deterministic;
    const char* true_optimum;
};

// Published values, with solutions written as ((x,y),f).
constexpr PublishedRow kPublished[] = {
    {"rosenbrock", 17.7524, 1041.8165, 0.9974, "((0.71,0.46),0.21)", "((0.98,0.95),0.00)", "((1,1),0)"},
    {"himmelblau", 7.3665, 137.8512, 0.9899, "((2.88,1.97),0.61)", "((3.59,-1.84),0.01)", "((3,2),0);((3.58,-1.85),0)"},
    {"booth", 7.2568, 202.1116, 0.9990, "((0.71,3.54),0.61)", "((0.99,2.99),0.00)", "((1,3),0)"},
    {"ackley", 0.5261, 0.4350, 0.9324, "((0.05,-0.05),0.33)", "((-0.03,-0.03),0.03)", "((0,0),0)"},
    {"rastrigin", 8.3745, 106.2288, 0.4887, "((-0.05,-0.05),1.05)", "((-0.03,-0.03),0.13)", "((0,0),0)"},
};

const PublishedRow& published(const std::string& name) {
    for (const auto& row : kPublished) {
        if (name == row.name) return row;
    }
    throw InvalidInput("no published row for '" + name + "'");
}

std::string best_text(const RunRecord& rec) {
    const auto& cands = rec.final_candidates();
    if (cands.empty()) return "";
    const auto& b = cands.front();
    return optimum_text(b.location, b.true_value.value_or(b.surrogate_value));
}

}  // namespace

const std::vector<Candidate>& RunRecord::final_candidates() const {
    static const std::vector<Candidate> empty;
    if (hybrid) return hybrid->optimum.candidates;
    return optimum ? optimum->candidates : empty;
}

const ErrorReport& RunRecord::final_metrics() const {
    return hybrid ? hybrid->surrogate_run.report : surrogate_run.report;
}

RunRecord run_pipeline(const RunConfig& cfg, PipelineStage stage, bool write_artifacts) {
    cfg.validate();
    const auto t_start = Clock::now();
    RunRecord rec;
    rec.config = cfg;
    rec.seeds = seed_plan(cfg.seed);
    const BenchmarkSpec spec = benchmark_by_name(cfg.benchmark);
    const NoiseModel noise{cfg.noise_kind, cfg.noise_sigma, rec.seeds.noise};

    auto t0 = Clock::now();
    rec.surrogate_run = in_stage("surrogate", [&] {
        if (cfg.mode == SurrogateMode::kDeterministic) return build_dense_surrogate(spec, cfg.dense);
        Algorithm1Config a = cfg.algorithm1;
        a.seed = rec.seeds.circles;
        return build_surrogate(spec, noise, a);
    });
    rec.timings.surrogate_seconds = seconds_since(t0);

    std::vector<std::pair<std::size_t, std::pair<MetricField, CurvatureField>>> snapshots;
    if (stage == PipelineStage::kOptimize) {
        t0 = Clock::now();
        rec.optimum = in_stage("optimize", [&] {
            auto ranker = std::make_shared<NoisyOracle>(spec, NoiseModel{cfg.noise_kind, cfg.noise_sigma, rec.seeds.ranking});
            const ScalarField oracle = [ranker](std::span<const double> x) { return (*ranker)(x); };
            SnapshotSink sink;
            if (write_artifacts && cfg.emit_grids) {
                sink = [&](std::size_t it, const MetricField& m, const CurvatureField& k) {
                    snapshots.push_back({it, {m, k}});
                };
            }
            return optimize(rec.surrogate_run.surrogate, cfg.flow, cfg.sense, oracle, sink);
        });
        rec.timings.optimize_seconds = seconds_since(t0);

        if (cfg.hybrid.enabled && rec.optimum->status == OptimizeStatus::kFound) {
            t0 = Clock::now();
            rec.hybrid = in_stage("hybrid", [&] {
                const Candidate& best = rec.optimum->best();
                const Domain zoom = cfg.hybrid.zoom ? *cfg.hybrid.zoom
                                                    : zoom_domain(spec.domain(), best.location, cfg.hybrid.shrink);
                Algorithm1Config a = cfg.algorithm1;
                a.seed = rec.seeds.hybrid_circles;
                a.points_per_circle = cfg.hybrid.points_per_circle;
                a.fit = cfg.hybrid.fit;
                const NoiseModel hn{cfg.noise_kind, cfg.noise_sigma, rec.seeds.hybrid_noise};
                return refine_hybrid(spec, best, zoom, cfg.hybrid.order, a, hn, cfg.flow, cfg.sense);
            });
            rec.timings.hybrid_seconds = seconds_since(t0);
        }
    }
    rec.timings.total_seconds = seconds_since(t_start);

    if (write_artifacts) {
        in_stage("output", [&] {
            std::filesystem::create_directories(cfg.output_dir);
            ArtifactWriter w{cfg.output_dir, rec.artifacts};
            w.text("config", "config.json", serialize_config(cfg));
            w.json("surrogate", "surrogate.json", surrogate_to_json(rec.surrogate_run.surrogate));
            w.text("samples", "samples.csv", samples_to_csv(rec.surrogate_run.samples));
            w.text("trace", "trace.jsonl", trace_to_jsonl(rec.surrogate_run.trace));
            w.json("metrics", "metrics.json", error_report_to_json(rec.surrogate_run.report));
            if (rec.optimum) w.json("candidates", "candidates.json", optimize_result_to_json(*rec.optimum));
            if (rec.hybrid) {
                const auto& h = *rec.hybrid;
                w.json("hybrid-surrogate", "hybrid_surrogate.json", surrogate_to_json(h.surrogate_run.surrogate));
                w.text("hybrid-trace", "hybrid_trace.jsonl", trace_to_jsonl(h.surrogate_run.trace));
                w.json("hybrid-metrics", "hybrid_metrics.json", error_report_to_json(h.surrogate_run.report));
                Json hc = optimize_result_to_json(h.optimum);
                hc["zoom"] = domain_to_json(h.zoom);
                w.json("hybrid-candidates", "hybrid_candidates.json", hc);
            }
            if (cfg.emit_grids) {
                const auto& s = rec.surrogate_run.surrogate;
                const auto& dom = s.domain();
                const GridAxis x{dom[0].lo, dom[0].hi, cfg.flow.nx};
                const GridAxis y{dom[1].lo, dom[1].hi, cfg.flow.ny};
                const Grid2D surr = s.evaluate_grid(x, y);
                Grid2D truth(y.count, x.count);
                Grid2D err(y.count, x.count);
                for (std::size_t r = 0; r < y.count; ++r) {
                    for (std::size_t c = 0; c < x.count; ++c) {
                        const double p[2] = {x.coord(c), y.coord(r)};
                        truth(r, c) = spec(p);
                        err(r, c) = std::abs(truth(r, c) - surr(r, c));
                    }
                }
                w.grid("grid-truth", "grids/truth", truth, x, y, 0.0, cfg.grid_format);
                w.grid("grid-surrogate", "grids/surrogate", surr, x, y, 0.0, cfg.grid_format);
                w.grid("grid-abs-error", "grids/abs_error", err, x, y, 0.0, cfg.grid_format);
                for (const auto& [it, fields] : snapshots) {
                    const auto tag = std::to_string(it);
                    w.grid("grid-metric-" + tag, "grids/metric_u_" + tag, fields.first.u, fields.first.x,
                           fields.first.y, fields.first.t, cfg.grid_format);
                    w.grid("grid-curvature-" + tag, "grids/curvature_" + tag, fields.second.k, fields.second.x,
                           fields.second.y, fields.first.t, cfg.grid_format);
                }
            }
            // The record lists itself so readers can locate every artifact.
            const auto record_path = cfg.output_dir / "record.json";
            rec.artifacts.emplace_back("record", record_path);
            write_text_file(record_path, run_record_to_json(rec).dump(2) + "\n");
            return 0;
        });
    }
    return rec;
}

Json run_record_to_json(const RunRecord& rec) {
    Json artifacts = Json::object();
    for (const auto& [label, path] : rec.artifacts) artifacts[label] = path.string();
    Json j{{"config", config_to_json(rec.config)},
           {"seed", rec.config.seed},
           {"seeds", seed_plan_to_json(rec.seeds)},
           {"surrogate_metrics", error_report_to_json(rec.surrogate_run.report)},
           {"samples", rec.surrogate_run.samples.size()},
           {"evaluations", rec.surrogate_run.evaluations},
           {"circles", rec.surrogate_run.iterations},
           {"timings",
            {{"surrogate_seconds", rec.timings.surrogate_seconds},
             {"optimize_seconds", rec.timings.optimize_seconds},
             {"hybrid_seconds", rec.timings.hybrid_seconds},
             {"total_seconds", rec.timings.total_seconds}}},
           {"artifacts", std::move(artifacts)}};
    j["optimum"] = rec.optimum ? optimize_result_to_json(*rec.optimum) : Json(nullptr);
    if (rec.hybrid) {
        j["hybrid"] = {{"zoom", domain_to_json(rec.hybrid->zoom)},
                       {"metrics", error_report_to_json(rec.hybrid->surrogate_run.report)},
                       {"optimum", optimize_result_to_json(rec.hybrid->optimum)}};
    } else {
        j["hybrid"] = nullptr;
    }
    return j;
}

std::string bound_series_csv(const std::vector<BoundBreakdown>& series) {
    std::ostringstream os;
    os << "N,truncation,e_fourier,e_sampling,e_noise,e_total\n";
    for (const auto& b : series) {
        os << b.n_samples << ',' << format_number(b.truncation, 17) << ',' << format_number(b.e_fourier, 17) << ','
           << format_number(b.e_sampling, 17) << ',' << format_number(b.e_noise, 17) << ','
           << format_number(b.e_total, 17) << '\n';
    }
    return os.str();
}

std::string decay_csv(const DecayReport& r) {
    std::ostringstream os;
    os << "N,measured_mae,measured_max,noisy_mae,noisy_max,bound_e_total,bound_e_fourier,bound_e_sampling,bound_e_noise\n";
    for (const auto& p : r.series) {
        os << p.n_samples << ',' << format_number(p.measured_mae, 17) << ',' << format_number(p.measured_max, 17) << ','
           << format_number(p.noisy_mae, 17) << ',' << format_number(p.noisy_max, 17) << ','
           << format_number(p.bound.e_total, 17) << ',' << format_number(p.bound.e_fourier, 17) << ','
           << format_number(p.bound.e_sampling, 17) << ',' << format_number(p.bound.e_noise, 17) << '\n';
    }
    return os.str();
}

BoundsRun run_bounds(const RunConfig& cfg, bool write_artifacts) {
    cfg.validate();
    const auto& b = cfg.bounds;
    if (!b.has_constants() && !b.empirical) {
        throw ConfigError("bounds: give c_f, c_s and c_sigma, or enable bounds.empirical to fit them");
    }
    const BenchmarkSpec spec = benchmark_by_name(cfg.benchmark);
    BoundsRun out;
    out.mode = b.truncation;
    const double terms =
        std::pow(2.0 * static_cast<double>(cfg.algorithm1.order) + 1.0, static_cast<double>(spec.dim()));
    if (b.has_constants()) {
        BoundParams p{*b.c_f, *b.c_s, *b.c_sigma, b.s, spec.dim(), b.delta, b.lipschitz, b.gap};
        std::vector<BoundBreakdown> series;
        for (auto n : b.sizes) {
            series.push_back(b.truncation == TruncationMode::kSampleCount ? total_error_bound(p, n)
                                                                          : total_error_bound(p, n, terms));
        }
        out.bound_series = std::move(series);
    }
    if (b.empirical) {
        DecayCheckConfig d = b.decay;
        d.seed = seed_plan(cfg.seed).decay;
        d.s = b.s;
        d.delta = b.delta;
        d.mode = b.truncation;
        out.decay = in_stage("bounds", [&] { return empirical_decay_check(spec, b.sizes, d); });
    }
    if (write_artifacts) {
        in_stage("output", [&] {
            ArtifactWriter w{cfg.output_dir, out.artifacts};
            if (out.bound_series) w.text("bounds", "bounds.csv", bound_series_csv(*out.bound_series));
            if (out.decay) w.text("decay", "decay.csv", decay_csv(*out.decay));
            return 0;
        });
    }
    return out;
}

TablesResult reproduce_tables(const std::filesystem::path& out_dir, std::uint64_t seed) {
    std::ostringstream t1;
    std::ostringstream t2;
    t1 << "function,domain,mae,mse,r_squared,n_samples,reference_mae,reference_mse,reference_r_squared,status\n";
    t2 << "function,stochastic_solution,deterministic_solution,true_optimum,reference_stochastic,reference_deterministic,"
          "reference_true_optimum,status\n";
    TablesResult result;
    for (const auto& name : benchmark_names()) {
        const auto& ref = published(name);
        const BenchmarkSpec spec = benchmark_by_name(name);
        RunConfig base;
        base.benchmark = name;
        base.seed = seed;
        base.output_dir = out_dir;

        std::string status = "ok";
        std::optional<RunRecord> stochastic;
        std::optional<RunRecord> deterministic;
        try {
            stochastic = run_pipeline(base, PipelineStage::kOptimize, false);
        } catch (const std::exception& e) {
            status = std::string("stochastic failed: ") + e.what();
        }
        try {
            RunConfig det = base;
            det.mode = SurrogateMode::kDeterministic;
            deterministic = run_pipeline(det, PipelineStage::kOptimize, false);
        } catch (const std::exception& e) {
            status = (status == "ok" ? std::string() : status + "; ") + "deterministic failed: " + e.what();
        }
        if (status != "ok") ++result.failed_rows;

        t1 << name << ',' << csv_field(domain_text(spec.domain())) << ',';
        if (stochastic) {
            const auto& r = stochastic->surrogate_run.report;
            t1 << num(r.mae) << ',' << num(r.mse) << ',' << (r.r_squared ? num(*r.r_squared) : std::string()) << ','
               << stochastic->surrogate_run.samples.size();
        } else {
            t1 << ",,,";
        }
        t1 << ',' << num(ref.mae) << ',' << num(ref.mse) << ',' << num(ref.r2) << ',' << csv_field(status) << '\n';

        std::string truth;
        for (const auto& opt : true_optimum(spec)) {
            if (!truth.empty()) truth += ";";
            truth += optimum_text(opt.location, opt.value);
        }
        t2 << name << ',' << csv_field(stochastic ? best_text(*stochastic) : std::string()) << ','
           << csv_field(deterministic ? best_text(*deterministic) : std::string()) << ',' << csv_field(truth) << ','
           << csv_field(ref.stochastic) << ',' << csv_field(ref.deterministic) << ',' << csv_field(ref.true_optimum)
           << ',' << csv_field(status) << '\n';
    }
    result.table1 = out_dir / "table1.csv";
    result.table2 = out_dir / "table2.csv";
    write_text_file(result.table1, t1.str());
    write_text_file(result.table2, t2.str());
    return result;
}

}  // namespace surroflow
