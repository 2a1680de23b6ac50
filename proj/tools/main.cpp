// Command-line front end: approximate, optimize, reproduce-tables, bounds.
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "surroflow/pipeline.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

void print_metrics(const surroflow::ErrorReport& r) {
    std::cout << "  MAE " << surroflow::format_number(r.mae) << "  MSE " << surroflow::format_number(r.mse)
              << "  R^2 " << (r.r_squared ? surroflow::format_number(*r.r_squared) : std::string("n/a")) << '\n';
}

void print_record(const surroflow::RunRecord& rec) {
    const auto& run = rec.surrogate_run;
    std::cout << "benchmark " << rec.config.benchmark << " (" << surroflow::to_string(rec.config.mode)
              << "), seed " << rec.config.seed << '\n';
    std::cout << "surrogate: " << run.samples.size() << " samples, " << run.iterations << " circles\n";
    print_metrics(run.report);
    if (rec.optimum) {
        const auto& o = *rec.optimum;
        std::cout << "flow: " << o.iterations << " iterations, " << o.candidates.size() << " candidates"
                  << (o.converged ? ", converged" : "") << '\n';
    }
    if (rec.hybrid) {
        std::cout << "hybrid surrogate on zoom box:\n";
        print_metrics(rec.hybrid->surrogate_run.report);
    }
    const auto& cands = rec.final_candidates();
    if (!cands.empty()) {
        const auto& b = cands.front();
        std::cout << "best: (";
        for (std::size_t i = 0; i < b.location.size(); ++i) {
            std::cout << (i ? ", " : "") << surroflow::format_number(b.location[i], 6);
        }
        std::cout << ")  f = " << surroflow::format_number(b.true_value.value_or(b.surrogate_value), 6) << '\n';
    } else if (rec.optimum) {
        std::cout << "best: none (no candidates detected)\n";
    }
    std::cout << "artifacts in " << rec.config.output_dir.string() << '\n';
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const surroflow::InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fourier surrogate construction and curvature-flow global optimisation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "tables";
    std::uint64_t table_seed = 0;
    std::string out_override;

    auto* approximate = app.add_subcommand("approximate", "Build the surrogate and write its artifacts");
    approximate->add_option("config", config_path, "JSON run configuration")->required();
    approximate->add_option("--out", out_override, "Override output_dir");

    auto* optimize = app.add_subcommand("optimize", "Build the surrogate, run the flow and write candidates");
    optimize->add_option("config", config_path, "JSON run configuration")->required();
    optimize->add_option("--out", out_override, "Override output_dir");

    auto* tables = app.add_subcommand("reproduce-tables", "Run all benchmarks and write table1.csv / table2.csv");
    tables->add_option("--out", out_dir, "Output directory");
    tables->add_option("--seed", table_seed, "Master seed");

    auto* bounds = app.add_subcommand("bounds", "Evaluate the error bound and optional empirical decay check");
    bounds->add_option("config", config_path, "JSON run configuration")->required();
    bounds->add_option("--out", out_override, "Override output_dir");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    auto load = [&] {
        auto cfg = surroflow::load_config(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        return cfg;
    };

    if (*approximate || *optimize) {
        const auto stage = *approximate ? surroflow::PipelineStage::kApproximate : surroflow::PipelineStage::kOptimize;
        return guarded([&] { print_record(surroflow::run_pipeline(load(), stage)); });
    }
    if (*tables) {
        return guarded([&] {
            const auto res = surroflow::reproduce_tables(out_dir, table_seed);
            std::cout << "wrote " << res.table1.string() << " and " << res.table2.string() << '\n';
            if (res.failed_rows) std::cout << res.failed_rows << " row(s) failed; see the status column\n";
        });
    }
    if (*bounds) {
        return guarded([&] {
            const auto cfg = load();
            const auto res = surroflow::run_bounds(cfg);
            std::cout << "truncation mode: " << surroflow::to_string(res.mode) << '\n';
            if (res.bound_series) {
                for (const auto& b : *res.bound_series) {
                    std::cout << "  N=" << b.n_samples << "  bound " << surroflow::format_number(b.e_total, 6)
                              << '\n';
                }
            }
            if (res.decay) {
                std::cout << "empirical check: bound dominates measured error: "
                          << (res.decay->dominates ? "yes" : "no") << '\n';
            }
            for (const auto& [label, path] : res.artifacts) std::cout << "  " << label << ": " << path.string() << '\n';
        });
    }
    return kExitValidation;
}
