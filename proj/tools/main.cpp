#include <CLI11.hpp>

#include <string>

#include "cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Guaranteed interval over-approximations of reachable sets for "
        "nonlinear systems, via interval sensitivity bounds"};
    app.require_subcommand(1);

    sensireach::cli::CliOptions options;
    std::uint64_t seed = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", options.config_path,
                        "Path to a JSON problem configuration")
            ->required();
        sub->add_option("--out", options.out_dir,
                        "Output directory (overrides the config)");
        sub->add_option("--seed", seed,
                        "Monte-Carlo seed (overrides the config)");
        sub->add_option("--threads", options.threads,
                        "Worker threads; 0 = SENSIREACH_THREADS or hardware");
        return sub;
    };

    add_common(app.add_subcommand(
        "run", "Compute a reach-set over-approximation and write result files"));
    add_common(app.add_subcommand(
        "compare", "Run every method over the configured grid levels"));
    add_common(app.add_subcommand(
        "mc", "Monte-Carlo containment check against a box or result file"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--out") > 0) {
        options.out_dir_set = true;
    }
    if (sub->count("--seed") > 0) {
        options.seed = seed;
    }
    return sensireach::cli::dispatch(sub->get_name(), options);
}
