// bsphere: command line front end of the Brownian-sphere toolkit.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bsphere/config.hpp"
#include "bsphere/errors.hpp"
#include "bsphere/runner.hpp"

namespace {

struct Flag {
    const char* key;
    const char* help;
};

// One flag per RunConfig field.
const std::vector<Flag> kFlags{
    {"profile", "suite profile: desk or quick"},
    {"root-seed", "64-bit root seed"},
    {"replicas", "replica count (0 = command default)"},
    {"grid-n", "grid steps (0 = command default)"},
    {"x", "starting level / spine level"},
    {"eps-list", "comma separated eps values"},
    {"p-list", "comma separated moment orders"},
    {"lambda", "scaling factor"},
    {"window-a", "lower lifetime window edge"},
    {"window-b", "upper lifetime window edge"},
    {"strata", "number of lifetime strata"},
    {"sigma-cut", "spine excursion cutoff"},
    {"ident-tol", "identification tolerance factor (0 = 2 sqrt(dt))"},
    {"anchors", "largest anchor count m"},
    {"m-ladder", "comma separated anchor ladder"},
    {"n-ladder", "comma separated grid ladder"},
    {"dt", "time step"},
    {"t", "time horizon"},
    {"s-fixed", "re-rooting time"},
    {"functional", "estimate functional: one, min-below, occupation"},
    {"level", "level of the min-below functional"},
    {"input", "comma separated trajectory files (metric-validate)"},
    {"workers", "worker threads"},
    {"output-dir", "output directory (default $BSPHERE_OUTPUT_DIR or bsphere-out)"},
};

std::string command_list() {
    std::string out;
    for (const auto& n : bsphere::command_names()) out += (out.empty() ? "" : " | ") + n;
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo toolkit for the Brownian snake and the Brownian sphere"};
    app.set_version_flag("--version", "bsphere 1.0.0");
    app.footer("Exit codes: 0 ok, 1 unknown command, 2 config error, 3 acceptance failure,\n"
               "4 resource error, 5 corrupt file, 6 output error.");

    std::string command;
    app.add_option("command", command, "one of: " + command_list())->required();
    std::string config_file;
    app.add_option("--config", config_file, "key=value configuration file (flags override it)");

    std::map<std::string, std::string> values;
    for (const auto& f : kFlags) app.add_option(std::string("--") + f.key, values[f.key], f.help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bsphere::kExitConfigError;
    }

    bsphere::RunConfig config;
    try {
        if (!config_file.empty()) {
            std::ifstream is(config_file);
            if (!is) throw bsphere::ParameterError("cannot read config file " + config_file);
            std::ostringstream text;
            text << is.rdbuf();
            bsphere::apply_config_text(config, text.str());
        }
        config.command = command;
        for (const auto& f : kFlags) {
            auto* opt = app.get_option(std::string("--") + f.key);
            if (opt->count() > 0) bsphere::apply_setting(config, f.key, values[f.key]);
        }
    } catch (const bsphere::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return bsphere::kExitConfigError;
    }
    return bsphere::run(config, std::cout, std::cerr);
}
