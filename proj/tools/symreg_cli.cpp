// Command-line front end: fit a dataset, run benchmark suites and
// ablations, generate the CDF generalization dataset, and evaluate the
// falling-balls measurement files.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "symreg/bench.hpp"

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitNoResult = 3;

symreg::RunConfig make_config(const std::string& config_path) {
    return config_path.empty() ? symreg::RunConfig{} : symreg::load_config(config_path);
}

int cmd_fit(const std::string& data_path, const std::string& config_path,
            std::uint64_t seed, const std::string& out_path) {
    symreg::RunConfig cfg = make_config(config_path);
    symreg::Dataset data = symreg::load_csv(data_path);
    bool with_constants = true;
    symreg::GrammarConfig grammar = cfg.grammar(data.dim(), with_constants);

    std::ofstream trace;
    symreg::PipelineOptions opt;
    if (!cfg.trace_file.empty()) {
        trace.open(cfg.trace_file);
        opt.trace = &trace;
    }

    auto t0 = std::chrono::steady_clock::now();
    symreg::PipelineResult res = symreg::run_pipeline(data, cfg, grammar, seed, opt);
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!res.found) {
        std::cerr << "no expression with finite reward found within budget\n";
        return kExitNoResult;
    }
    nlohmann::ordered_json j;
    j["data"] = data_path;
    j["seed"] = seed;
    j["best_expression"] = symreg::to_infix(res.best.composed);
    j["best_reward"] = res.best.reward;
    j["error_sq_sum"] = res.best.sse;
    j["form"] = {{"kind", symreg::form_kind_name(res.final_form.kind)},
                 {"A", res.final_form.fixed_text()},
                 {"parity", symreg::parity_name(res.final_form.parity)}};
    std::vector<std::string> parity;
    for (symreg::Parity p : res.parity.parity) parity.push_back(symreg::parity_name(p));
    j["parity"] = parity;
    j["sym_error"] = res.parity.sym_error;
    j["epochs_run"] = res.epochs_run;
    j["wall_time_s"] = elapsed;
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << j.dump(2) << "\n";
    }
    return 0;
}

int run_outcomes(const std::vector<symreg::BenchmarkCase>& cases, int runs,
                 const symreg::RunConfig& cfg, std::uint64_t seed, int jobs,
                 const std::string& out_dir) {
    std::vector<symreg::CaseOutcome> outcomes;
    for (const symreg::BenchmarkCase& c : cases) {
        symreg::CaseOutcome o = symreg::recovery_rate(c, runs, cfg, seed, jobs);
        std::printf("%-14s runs=%d recovery=%.2f mean_time=%.1fs\n", o.bench.name.c_str(),
                    runs, o.recovery_rate(), o.mean_time());
        std::fflush(stdout);
        outcomes.push_back(std::move(o));
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        symreg::write_results_jsonl(out_dir + "/results.jsonl", outcomes);
        symreg::write_summary_csv(out_dir + "/summary.csv", outcomes);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic regression engine"};
    app.require_subcommand(1);

    // fit
    std::string fit_data, fit_config, fit_out;
    std::uint64_t fit_seed = 1;
    CLI::App* fit = app.add_subcommand("fit", "recover an expression from a CSV dataset");
    fit->add_option("--data", fit_data, "dataset CSV (header x1,...,xd,y)")->required();
    fit->add_option("--config", fit_config, "key=value config file");
    fit->add_option("--seed", fit_seed, "random seed");
    fit->add_option("--out", fit_out, "write the result JSON here");

    // bench
    std::string bench_suite, bench_config, bench_out_dir, bench_budget = "full", bench_case;
    int bench_runs = 10, bench_jobs = 1;
    std::uint64_t bench_seed = 1;
    CLI::App* bench = app.add_subcommand("bench", "run a benchmark suite");
    bench->add_option("--suite", bench_suite, "nguyen|nguyen_c|livermore|r|r_star")->required();
    bench->add_option("--runs", bench_runs, "independent runs per case")->required();
    bench->add_option("--budget", bench_budget, "full|desk");
    bench->add_option("--case", bench_case, "restrict to one case by name");
    bench->add_option("--config", bench_config, "key=value config file");
    bench->add_option("--seed", bench_seed, "base seed");
    bench->add_option("--jobs", bench_jobs, "parallel runs");
    bench->add_option("--out-dir", bench_out_dir, "write results.jsonl and summary.csv here");

    // ablate
    std::string ab_model, ab_suite, ab_config, ab_out_dir;
    int ab_runs = 10, ab_jobs = 1;
    std::uint64_t ab_seed = 1;
    CLI::App* ab = app.add_subcommand("ablate", "run a suite with one block disabled");
    ab->add_option("--model", ab_model, "A|B|C|D")->required();
    ab->add_option("--suite", ab_suite, "nguyen|nguyen_c|livermore|r|r_star")->required();
    ab->add_option("--runs", ab_runs, "independent runs per case")->required();
    ab->add_option("--config", ab_config, "key=value config file");
    ab->add_option("--seed", ab_seed, "base seed");
    ab->add_option("--jobs", ab_jobs, "parallel runs");
    ab->add_option("--out-dir", ab_out_dir, "write results.jsonl and summary.csv here");

    // gen-cdf
    double cdf_mu = 0.0, cdf_sigma = 1.0, cdf_lo = -100.0, cdf_hi = 100.0;
    int cdf_n = 201;
    std::string cdf_out;
    CLI::App* cdf = app.add_subcommand("gen-cdf", "generate the Gaussian CDF dataset");
    cdf->add_option("--mu", cdf_mu, "mean");
    cdf->add_option("--sigma", cdf_sigma, "variance (positive)");
    cdf->add_option("--lo", cdf_lo, "range start");
    cdf->add_option("--hi", cdf_hi, "range end");
    cdf->add_option("--n", cdf_n, "number of points");
    cdf->add_option("--out", cdf_out, "output CSV")->required();

    // balls
    std::vector<std::string> ball_files;
    std::string ball_config;
    std::uint64_t ball_seed = 1;
    bool ball_seeded_form = false;
    CLI::App* balls = app.add_subcommand("balls", "evaluate falling-ball measurement files");
    balls->add_option("--files", ball_files, "two-column CSV files (t,h)")->required();
    balls->add_option("--config", ball_config, "key=value config file");
    balls->add_option("--seed", ball_seed, "random seed");
    balls->add_flag("--seeded-form", ball_seeded_form,
                    "pin the cubic-plus-residual wrapper during search");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    }

    try {
        if (*fit) return cmd_fit(fit_data, fit_config, fit_seed, fit_out);
        if (*bench) {
            symreg::RunConfig cfg = make_config(bench_config);
            symreg::apply_budget(cfg, bench_budget);
            std::vector<symreg::BenchmarkCase> cases = symreg::load_suite(bench_suite);
            if (!bench_case.empty()) {
                std::erase_if(cases, [&](const symreg::BenchmarkCase& c) {
                    return c.name != bench_case;
                });
                if (cases.empty()) throw std::invalid_argument("no case named " + bench_case);
            }
            return run_outcomes(cases, bench_runs, cfg, bench_seed, bench_jobs, bench_out_dir);
        }
        if (*ab) {
            symreg::RunConfig cfg = make_config(ab_config);
            if (ab_model.size() != 1 || ab_model[0] < 'A' || ab_model[0] > 'D')
                throw std::invalid_argument("model must be one of A, B, C, D");
            cfg.ablation = static_cast<symreg::AblationModel>(1 + (ab_model[0] - 'A'));
            return run_outcomes(symreg::load_suite(ab_suite), ab_runs, cfg, ab_seed, ab_jobs,
                                ab_out_dir);
        }
        if (*cdf) {
            symreg::Dataset ds = symreg::cdf_dataset(cdf_mu, cdf_sigma, {cdf_lo, cdf_hi}, cdf_n);
            symreg::save_csv(cdf_out, ds);
            return 0;
        }
        if (*balls) {
            symreg::RunConfig cfg = make_config(ball_config);
            std::printf("%-24s %10s %10s %10s %10s\n", "name", "model", "M-A", "M-B", "M-C");
            for (const std::string& f : ball_files) {
                symreg::Dataset data = symreg::load_two_column_csv(f);
                std::string name = std::filesystem::path(f).stem().string();
                symreg::BallResult r =
                    symreg::falling_balls_eval(name, data, cfg, ball_seed, ball_seeded_form);
                std::printf("%-24s %10.4g %10.4g %10.4g %10.4g   %s\n", r.name.c_str(),
                            r.mse_model, r.mse_ma, r.mse_mb, r.mse_mc, r.expression.c_str());
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return 0;
}
