#include "nlsball/config.hpp"
#include "nlsball/errors.hpp"
#include "nlsball/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv)
{
    using namespace nlsball;

    CLI::App app{"Spectral laboratory for the radial NLS on the unit ball"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;

    for (auto name : command_names()) {
        auto* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--seed", seed, "master seed (overrides the file)");
        sub->add_option("--workers", workers, "worker threads (overrides the file)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out, "output directory (overrides the file)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    ConfigOverrides ov;
    ov.seed = seed;
    ov.workers = workers;
    if (out)
        ov.output_dir = *out;

    RunConfig cfg;
    try {
        cfg = load_config(config_path, ov);
        if (to_string(cfg.command) != command)
            throw ValidationError("configuration command '" + std::string(to_string(cfg.command)) +
                                  "' does not match the requested command '" + command + "'");
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (out) {
            try {
                write_error_report(*out, ExitValidation, "validation", e.what(), 0);
            } catch (const std::exception&) {
            }
        }
        return ExitValidation;
    }

    const RunResult res = run(cfg, std::cout);
    if (res.exit_code != ExitSuccess)
        std::cerr << "error: " << res.message << '\n';
    return res.exit_code;
}
