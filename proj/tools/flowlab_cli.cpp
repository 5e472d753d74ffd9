#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flowlab/bench.hpp"
#include "flowlab/config.hpp"
#include "flowlab/errors.hpp"

using namespace flowlab;

namespace {

int execute(const BenchmarkConfig& cfg, const std::string& out, bool show_progress) {
    if (show_progress)
        set_progress_callback([](double t, int step) {
            if (step % 25 == 0) std::fprintf(stderr, "\rstep %d  t = %.4f", step, t);
        });
    const Report rep = run_benchmark(cfg);
    if (show_progress) std::fprintf(stderr, "\n");
    rep.write(out);
    std::cout << rep.format();
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-phase and free-surface flow benchmarks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version());

    std::string benchmark, config_path, out = "out", method;
    bool progress = false;
    auto* run = app.add_subcommand("run", "Run one benchmark and write its CSV, VTK and report files");
    run->add_option("benchmark", benchmark, "static_drop | rising_bubble | sloshing_tank | verification")->required();
    run->add_option("--config", config_path, "Key = value configuration file")->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory");
    run->add_option("--method", method, "Overrides the method in the configuration");
    run->add_flag("--progress", progress, "Print step progress to stderr");

    bool all = false;
    std::string verify_method;
    std::string verify_out = "out";
    auto* verify = app.add_subcommand("verify", "Run the method property suites");
    auto* all_opt = verify->add_flag("--all", all, "Run every suite");
    verify->add_option("--method", verify_method, "levelset | vof | phasefield | mac")->excludes(all_opt);
    verify->add_option("--out", verify_out, "Output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            KeyValueConfig kv = config_path.empty() ? KeyValueConfig{} : KeyValueConfig::load(config_path);
            kv.set("benchmark", benchmark);
            if (!method.empty()) kv.set("method", method);
            kv.set("output_dir", out);
            BenchmarkConfig cfg = BenchmarkConfig::from(kv);
            cfg.validate();
            return execute(cfg, out, progress);
        }
        if (!all && verify_method.empty()) {
            std::cerr << "verify needs --all or --method\n";
            return 2;
        }
        KeyValueConfig kv;
        kv.set("benchmark", "verification");
        kv.set("method", all ? "all" : verify_method);
        kv.set("output_dir", verify_out);
        BenchmarkConfig cfg = BenchmarkConfig::from(kv);
        cfg.validate();
        return execute(cfg, verify_out, false);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
