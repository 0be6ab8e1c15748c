#include <nnls/experiment.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Nonlocal NLS toolkit: scattering data, phase function, long-time asymptotics and split-step checks"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    double tol_scale = 1.0;
    unsigned threads = 0;
    app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
    app.add_option("--out", out_dir, "results directory (overrides the config)");
    app.add_option("--tol-scale", tol_scale, "multiply every numerical tolerance");
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"scatter", "scattering data on the real spectral grid plus genericity report"},
        {"phase", "nu, delta0 and the nu-tail integral on each ray"},
        {"asym", "leading-order asymptotics for a batch of (x, t) queries"},
        {"evolve", "split-step evolution with snapshots at the requested times"},
        {"compare", "numerical solution against the asymptotic formula along each ray"},
        {"report", "plot data and pass/fail summary from compare outputs"},
        {"verify", "scattering invariants and the box-potential oracle"}};
    app.fallthrough();
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return nnls::exit_input;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        nnls::ExperimentConfig cfg = nnls::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (tol_scale != 1.0) cfg.apply_tol_scale(tol_scale);
        cfg.threads = threads;
        return nnls::run_subcommand(cmd, cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "nnls " << cmd << ": " << e.what() << "\n";
        return nnls::exit_code_for(e);
    }
}
