#include "divergent/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace divergent;

experiment::Settings parse_overrides(const std::vector<std::string>& items)
{
    experiment::Settings out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--set", "expected key=value, got '" + item + "'");
        out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

struct SourceFlags {
    std::string config;
    std::string maze;
    std::string strategy;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> set;

    void add(CLI::App* cmd, bool with_config = true)
    {
        if (with_config)
            cmd->add_option("--config", config, "Run configuration file");
        cmd->add_option("--maze", maze, "Maze file, overriding the config");
        cmd->add_option("--strategy", strategy, "Strategy kind, overriding the config");
        cmd->add_option("--seed", seed, "Run seed");
        cmd->add_option("--set", set, "Extra key=value setting, applied last")->allow_extra_args(false);
    }

    cli::ConfigSource source() const
    {
        cli::ConfigSource s;
        if (!config.empty())
            s.config = config;
        if (!maze.empty())
            s.maze = maze;
        if (!strategy.empty())
            s.strategy = strategy;
        s.seed = seed;
        s.overrides = parse_overrides(set);
        return s;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Divergent search experiments on maze navigation"};
    app.require_subcommand(1);
    int status = 0;

    auto* run = app.add_subcommand("run", "Execute one evolutionary run");
    SourceFlags run_src;
    run_src.add(run);
    std::string run_out = ".";
    run->add_option("--out", run_out, "Output directory");
    run->callback([&] { status = cli::cmd_run({run_src.source(), run_out}, std::cout, std::cerr); });

    auto* batch = app.add_subcommand("batch", "Execute every run listed by a manifest");
    std::string batch_manifest;
    std::string batch_out;
    std::optional<int> batch_workers;
    batch->add_option("--manifest", batch_manifest, "Batch manifest")->required();
    batch->add_option("--out", batch_out, "Output directory, overriding the manifest");
    batch->add_option("--workers", batch_workers, "Concurrent runs")->check(CLI::PositiveNumber);
    batch->callback([&] {
        cli::BatchOptions o;
        o.manifest = batch_manifest;
        if (!batch_out.empty())
            o.out = batch_out;
        o.workers = batch_workers;
        status = cli::cmd_batch(o, std::cout, std::cerr);
    });

    auto* gen = app.add_subcommand("generate", "Write a suite of generated mazes");
    cli::GenerateOptions gen_opts;
    std::string gen_config;
    std::string gen_out = ".";
    gen->add_option("--config", gen_config, "Generator settings (gen.* keys)");
    gen->add_option("--count", gen_opts.count, "Number of mazes")->required();
    gen->add_option("--seed", gen_opts.seed, "Generator seed");
    gen->add_option("--subdivisions", gen_opts.subdivisions, "Force the number of subdivisions");
    gen->add_option("--out", gen_out, "Output directory");
    gen->callback([&] {
        if (!gen_config.empty())
            gen_opts.config = gen_config;
        gen_opts.out = gen_out;
        status = cli::cmd_generate(gen_opts, std::cout, std::cerr);
    });

    auto* sens = app.add_subcommand("sensitivity", "Sweep k and n and pick the best cell");
    SourceFlags sens_src;
    sens_src.add(sens);
    cli::SensitivityOptions sens_opts;
    std::string sens_out = ".";
    sens->add_option("--grid", sens_opts.grid, "For example 'k=20..200/20;n=1,2'")->required();
    sens->add_option("--runs", sens_opts.runs, "Runs per cell")->required();
    sens->add_option("--workers", sens_opts.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    sens->add_option("--out", sens_out, "Output directory");
    sens->callback([&] {
        sens_opts.source = sens_src.source();
        sens_opts.out = sens_out;
        status = cli::cmd_sensitivity(sens_opts, std::cout, std::cerr);
    });

    auto* bench = app.add_subcommand("bench-generated", "Compare strategies across a generated maze suite");
    cli::BenchOptions bench_opts;
    std::string bench_manifest;
    std::vector<std::string> bench_configs;
    std::vector<std::string> bench_set;
    std::string bench_out = ".";
    bench->add_option("--manifest", bench_manifest, "Manifest written by generate")->required();
    bench->add_option("--config", bench_configs, "Strategy template config (repeatable)")->allow_extra_args(false);
    bench->add_option("--strategy", bench_opts.strategies, "Strategy kind on the generated preset (repeatable)")
        ->allow_extra_args(false);
    bench->add_option("--seed", bench_opts.seed, "Base seed");
    bench->add_option("--set", bench_set, "Extra key=value setting, applied last")->allow_extra_args(false);
    bench->add_option("--runs", bench_opts.runs, "Runs per strategy and maze")->required();
    bench->add_option("--workers", bench_opts.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_out, "Output directory");
    bench->callback([&] {
        bench_opts.manifest = bench_manifest;
        bench_opts.configs.assign(bench_configs.begin(), bench_configs.end());
        bench_opts.overrides = parse_overrides(bench_set);
        bench_opts.out = bench_out;
        status = cli::cmd_bench_generated(bench_opts, std::cout, std::cerr);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    return status;
}
