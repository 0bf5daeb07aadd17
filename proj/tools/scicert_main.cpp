#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "scicert/pipeline.hpp"
#include "scicert/util.hpp"

int main(int argc, char** argv) {
    CLI::App app{"scicert: certainty measurement pipeline for scientific abstracts"};
    app.require_subcommand(1);

    std::string config_path;
    const char* env = std::getenv("SCICERT_CONFIG");
    if (env) config_path = env;
    app.add_option("-c,--config", config_path, "run configuration INI file")
        ->envname("SCICERT_CONFIG");
    int workers = -1;
    app.add_option("-j,--workers", workers, "worker threads (0 = machine parallelism)");
    std::string out_dir;
    app.add_option("-o,--out", out_dir, "output directory (overrides config)");

    auto* ingest = app.add_subcommand("ingest", "validate and canonicalize the corpus");
    auto* score = app.add_subcommand("score", "split, tag and score abstract sentences");
    auto* features = app.add_subcommand("features", "per-paper team and gender features");
    auto* network = app.add_subcommand("network", "coauthorship network metrics");
    auto* analyze = app.add_subcommand("analyze", "temporal, correlation and geographic tables");
    auto* report = app.add_subcommand("report", "figure-ready JSON and the report manifest");
    auto* run = app.add_subcommand("run", "run every stage in order");
    auto* config_cmd = app.add_subcommand("config", "print the resolved configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty())
            throw scicert::PipelineError("no configuration: pass --config or set SCICERT_CONFIG");
        scicert::RunConfig cfg = scicert::RunConfig::load(config_path);
        if (workers >= 0) cfg.workers = workers;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        scicert::Pipeline pipeline(cfg);

        if (config_cmd->parsed()) {
            std::cout << cfg.serialize();
            return 0;
        }
        if (ingest->parsed()) pipeline.run_ingest();
        else if (score->parsed()) pipeline.run_score();
        else if (features->parsed()) pipeline.run_features();
        else if (network->parsed()) pipeline.run_network();
        else if (analyze->parsed()) pipeline.run_analyze();
        else if (report->parsed()) pipeline.run_report();
        else if (run->parsed()) pipeline.run_all();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
