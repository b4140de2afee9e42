// lambdajc <command> --config <file> [--out <dir>] [--workers N] [--strict]
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lambdajc/runner.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Phase diagrams, effective parameters and Loschmidt echoes of a driven "
                 "two-mode Lambda Jaynes-Cummings system"};
    app.set_version_flag("--version", std::string(lambdajc::version));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned workers = 0;
    bool strict = false;
    std::size_t stop_after = 0;

    for (const char* name : {"static-phase", "driven-phase", "effective-params", "echo"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON configuration file")->required();
        sub->add_option("--out", out_dir,
                        std::string("Output directory (overrides ") + lambdajc::output_env_var +
                            " and the config)");
        sub->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--strict", strict, "Fail on validity or truncation violations");
        sub->add_option("--stop-after", stop_after, "Stop after computing N cells")
            ->group("");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : lambdajc::exit_config;
    }

    const auto* sub = app.get_subcommands().front();
    try {
        const auto command = lambdajc::parse_command(sub->get_name());
        std::ifstream in(config_path, std::ios::binary);
        if (!in)
            throw lambdajc::ConfigError("cannot read config file '" + config_path + "'");
        std::stringstream text;
        text << in.rdbuf();
        const auto cfg = lambdajc::parse_config(text.str());

        lambdajc::RunOptions opt;
        if (!out_dir.empty())
            opt.out_dir = out_dir;
        if (sub->count("--workers"))
            opt.workers = workers;
        opt.strict = strict;
        if (sub->count("--stop-after"))
            opt.stop_after = stop_after;

        const auto rep = lambdajc::run(command, cfg, opt, &std::cerr);
        std::cout << rep.csv_path.string() << '\n';
        return rep.exit_code;
    } catch (const lambdajc::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lambdajc::exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return lambdajc::exit_runtime;
    }
}
