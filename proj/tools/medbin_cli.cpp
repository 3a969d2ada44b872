// medbin: medians, selection, update simulation and benchmarks from the shell.

#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medbin/bench.hpp"
#include "medbin/bin_engine.hpp"
#include "medbin/core_select.hpp"
#include "medbin/io.hpp"
#include "medbin/moments.hpp"
#include "medbin/updatable.hpp"

namespace {

using medbin::io::format_double;

struct InputOptions {
    std::string path = "-";
    std::string format = "text";
    std::size_t max_values = 0; // 0: no limit

    medbin::io::InputSpec spec(const std::string& path_override = {}) const {
        medbin::io::InputSpec s;
        s.path = path_override.empty() ? path : path_override;
        s.format = medbin::io::format_from_name(format);
        if (max_values > 0) s.max_values = max_values;
        return s;
    }
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input,-i", in.path, "Input file, '-' for standard input")->capture_default_str();
    cmd->add_option("--format,-f", in.format, "Input format")
        ->check(CLI::IsMember({"text", "binary"}))
        ->capture_default_str();
    cmd->add_option("--max-values", in.max_values, "Refuse inputs with more values than this");
}

std::vector<double> load(const medbin::io::InputSpec& spec) {
    auto values = medbin::io::read_input(spec);
    if (values.empty()) throw medbin::ContractViolation("input '" + spec.path + "' holds no values");
    return values;
}

int cmd_median(const InputOptions& in, const std::string& mode, medbin::BinParams params) {
    params.validate();
    auto data = load(in.spec());
    if (mode == "exact-bin") {
        std::cout << format_double(medbin::binmedian(data, params)) << '\n';
    } else if (mode == "exact-select") {
        std::cout << format_double(medbin::median_select(data)) << '\n';
    } else if (mode == "sort") {
        std::cout << format_double(medbin::sort_median(data)) << '\n';
    } else {
        const double v = medbin::binapprox(data, params.bins);
        const double bound = medbin::compute_moments(data).sigma() / static_cast<double>(params.bins);
        std::cout << format_double(v) << '\n' << "bound=" << format_double(bound) << '\n';
    }
    return 0;
}

int cmd_select(const InputOptions& in, std::size_t k) {
    auto data = load(in.spec());
    std::cout << format_double(medbin::select_kth(data, k)) << '\n';
    return 0;
}

int cmd_update_sim(const InputOptions& in, const std::vector<std::string>& batches, const std::string& mode,
                   medbin::BinParams params) {
    medbin::UpdatableMedian um(load(in.spec()), params);
    const bool approx = mode == "approx";
    auto report = [&](std::size_t step) {
        std::cout << "step=" << step << ' ';
        if (approx) {
            const auto a = um.query_approx();
            std::cout << "median=" << format_double(a.value) << " bound=" << format_double(a.error_bound);
        } else {
            std::cout << "median=" << format_double(um.query_exact());
        }
        std::cout << " n=" << um.size() << " n0=" << um.n0() << " rebuilds=" << um.rebuild_count() << '\n';
    };
    report(0);
    for (std::size_t j = 0; j < batches.size(); ++j) {
        um.add(load(in.spec(batches[j])));
        report(j + 1);
    }
    return 0;
}

struct BenchOptions {
    std::string scenario;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n;
    std::optional<std::size_t> reps;
    std::optional<std::size_t> block;
    std::optional<std::size_t> bins;
    std::optional<std::size_t> cutoff;
    std::string out;
    bool verify_only = false;
};

std::vector<medbin::bench::BenchScenario> pick_scenarios(const BenchOptions& o) {
    namespace mb = medbin::bench;
    std::vector<mb::BenchScenario> out;
    if (!o.config.empty()) {
        std::ifstream f(o.config);
        if (!f) throw medbin::ConfigError("cannot open config '" + o.config + "'");
        std::stringstream text;
        text << f.rdbuf();
        out.push_back(mb::scenario_from_json(text.str()));
    } else if (o.scenario == "table1") {
        out = mb::table1_scenarios();
    } else if (o.scenario == "table2") {
        out = mb::table2_scenarios();
    } else if (o.scenario == "all") {
        out = mb::table1_scenarios();
        for (auto& s : mb::table2_scenarios()) out.push_back(std::move(s));
    } else {
        out.push_back(mb::builtin_scenario(o.scenario));
    }
    for (auto& s : out) {
        if (o.seed) s.seed = *o.seed;
        if (o.n) s.base_size = *o.n;
        if (o.reps) s.repetitions = *o.reps;
        if (o.block) s.block_size = *o.block;
        if (o.bins) s.params.bins = *o.bins;
        if (o.cutoff) s.params.cutoff = *o.cutoff;
        s.validate();
    }
    return out;
}

int cmd_bench(const BenchOptions& o) {
    namespace mb = medbin::bench;
    const auto scenarios = pick_scenarios(o);
    std::vector<mb::BenchReport> reports;
    if (o.verify_only) {
        std::vector<std::future<mb::BenchReport>> jobs;
        for (const auto& s : scenarios) {
            jobs.push_back(std::async(std::launch::async, [s] { return mb::run(s, {.timing = false}); }));
        }
        for (auto& j : jobs) reports.push_back(j.get());
    } else {
        for (const auto& s : scenarios) reports.push_back(mb::run(s));
    }

    for (const auto& r : reports) mb::print_table(std::cout, r);
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw medbin::ConfigError("cannot write report '" + o.out + "'");
        for (const auto& r : reports) mb::write_records(f, r);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Median selection by successive binning"};
    app.require_subcommand(1);

    InputOptions input;
    medbin::BinParams params;
    auto add_bin_flags = [&](CLI::App* cmd) {
        cmd->add_option("--bins,-B", params.bins, "Bins per round (B)")->capture_default_str();
        cmd->add_option("--cutoff,-C", params.cutoff, "Insertion-sort cutoff (C)")->capture_default_str();
    };

    std::string median_mode = "exact-bin";
    auto* median = app.add_subcommand("median", "Median of the input values");
    add_input_flags(median, input);
    add_bin_flags(median);
    median->add_option("--mode,-m", median_mode, "Algorithm")
        ->check(CLI::IsMember({"exact-bin", "exact-select", "approx", "sort"}))
        ->capture_default_str();

    std::size_t k = 0;
    auto* select = app.add_subcommand("select", "k-th smallest input value (1-based)");
    add_input_flags(select, input);
    select->add_option("--k,-k", k, "Rank")->required();

    std::string update_mode = "exact";
    std::vector<std::string> batch_files;
    auto* update = app.add_subcommand("update-sim", "Median after each batch is added to a base set");
    add_input_flags(update, input);
    add_bin_flags(update);
    update->add_option("--mode,-m", update_mode, "Query type")
        ->check(CLI::IsMember({"exact", "approx"}))
        ->capture_default_str();
    update->add_option("batches", batch_files, "Batch files, applied in order");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run benchmark scenarios");
    auto* scen = bench_cmd->add_option("--scenario,-s", bench.scenario,
                                       "Built-in scenario name, or table1, table2, all");
    bench_cmd->add_option("--config", bench.config, "JSON scenario file")->excludes(scen);
    bench_cmd->add_option("--seed", bench.seed, "Seed override");
    bench_cmd->add_option("--n", bench.n, "Base size override");
    bench_cmd->add_option("--reps", bench.reps, "Repetitions override");
    bench_cmd->add_option("--block", bench.block, "Medians per timed block override");
    bench_cmd->add_option("--bins,-B", bench.bins, "Bins per round (B)");
    bench_cmd->add_option("--cutoff,-C", bench.cutoff, "Insertion-sort cutoff (C)");
    bench_cmd->add_option("--out,-o", bench.out, "Write JSON-lines records here");
    bench_cmd->add_flag("--verify-only", bench.verify_only, "Correctness checks only, scenarios in parallel");
    bench_cmd->callback([&] {
        if (bench.scenario.empty() && bench.config.empty()) {
            throw CLI::ValidationError("bench", "one of --scenario or --config is required");
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*median) return cmd_median(input, median_mode, params);
        if (*select) return cmd_select(input, k);
        if (*update) return cmd_update_sim(input, batch_files, update_mode, params);
        if (*bench_cmd) return cmd_bench(bench);
    } catch (const medbin::bench::CorrectnessError& e) {
        std::cerr << "medbin: correctness check failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "medbin: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
