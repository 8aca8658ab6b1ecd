#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlpost/config.hpp"
#include "wlpost/runner.hpp"
#include "wlpost/validation.hpp"

namespace {

using namespace wlpost;

RunConfig build_config(const std::string& path, const std::vector<std::string>& sets,
                       const std::optional<std::uint64_t>& seed, const std::string& out)
{
    RunConfig cfg = load_config(path);
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed)
        cfg.seed = *seed;
    if (!out.empty())
        cfg.out = out;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Wang-Landau posterior sampler for doubly-intractable models"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool resume = false;

    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    run->add_option("--config", config_path, "Config file (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Master seed (overrides the config)");
    run->add_option("--out", out, "Output directory (overrides the config)");
    run->add_flag("--resume", resume, "Continue from <out>/checkpoint.bin");
    run->add_option("--set", sets, "Override a config key, key=value (repeatable)");

    std::string level = "fast";
    std::string validate_out = "validation";
    auto* val = app.add_subcommand("validate", "Run the oracle-backed validation suite");
    val->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    val->add_option("--out", validate_out, "Directory for report.json and cached runs");

    std::string grid_text;
    std::string surface_out;
    auto* surf = app.add_subcommand("surface", "Evaluate log Z on a grid");
    surf->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    surf->add_option("--grid", grid_text, "lo:hi:steps")->required();
    surf->add_option("--seed", seed, "Master seed (overrides the config)");
    surf->add_option("--out", surface_out, "CSV path (default <out>/surface.csv)");
    surf->add_option("--set", sets, "Override a config key, key=value (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto cfg = build_config(config_path, sets, seed, out);
            RunControls ctl;
            ctl.resume = resume;
            ctl.log = &std::cerr;
            const auto result = run_experiment(cfg, ctl);
            std::cout << "posterior mean:";
            for (double m : result.summary.mean)
                std::cout << ' ' << m;
            std::cout << "\nfinal-half acceptance: " << result.final_half_acceptance << "\noutputs in " << cfg.out
                      << '\n';
            return 0;
        }
        if (*val) {
            const auto report = validate_suite(parse_validation_level(level), validate_out, &std::cout);
            return report["all_pass"].get<bool>() ? 0 : 1;
        }
        if (*surf) {
            const auto cfg = build_config(config_path, sets, seed, "");
            const auto rows = surface_on_grid(cfg, parse_grid(grid_text), &std::cerr);
            std::string path = surface_out;
            if (path.empty()) {
                std::filesystem::create_directories(cfg.out);
                path = (std::filesystem::path(cfg.out) / "surface.csv").string();
            }
            write_surface_csv(rows, path);
            std::cout << "wrote " << rows.size() << " rows to " << path << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
