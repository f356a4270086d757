#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "tsallis/parallel.hpp"
#include "tsallis/qcalc.hpp"

int main(int argc, char** argv) {
    using namespace tsallis::app;
    CLI::App app{"tsallis: pricing under Tsallis relative entropy"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    RunOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "scenario file (YAML)")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override numerics.seed");
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores; results do not depend on it")
            ->capture_default_str();
        sub->add_flag("--strict", opt.strict, "treat warnings as errors");
    };
    for (const char* name : {"price", "entropy", "dual", "sweep", "properties"}) {
        const char* help = std::string(name) == "price"        ? "buyer price with CE and risk-neutral bounds"
                           : std::string(name) == "entropy"    ? "Tsallis entropy estimates by both routes"
                           : std::string(name) == "dual"       ? "dual objectives at optimizers and candidate grids"
                           : std::string(name) == "sweep"      ? "gamma sweep and scaling identity"
                                                               : "property matrix and bounds on the claim battery";
        add_common(app.add_subcommand(name, help));
    }
    CLI11_PARSE(app, argc, argv);
    opt.command = app.get_subcommands().front()->get_name();

    try {
        tsallis::set_thread_count(opt.threads);
        ScenarioConfig cfg = load_config(config_path);
        if (seed) cfg.setup.seed = *seed;
        return run_command(cfg, opt, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
    } catch (const tsallis::DomainError& e) {
        std::cerr << "domain error: " << e.what() << " (value " << e.value() << ", bound " << e.bound() << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return kExitError;
}
