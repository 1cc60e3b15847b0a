#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fluxlim/cli_commands.hpp"

namespace {

std::vector<double> parse_values(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw fluxlim::config_error("");
        } catch (const std::exception&) {
            throw fluxlim::config_error("--values: bad number '" + item + "'");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator and certificate checker for radial chemotaxis blow-up"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    long long seed = -1;
    std::string axis;
    std::string values_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "RNG seed (overrides config)");
    };
    auto* validate = app.add_subcommand("validate", "check the structural assumptions");
    add_common(validate);
    auto* certify = app.add_subcommand("certify", "sample the subsolution certificate");
    add_common(certify);
    auto* simulate = app.add_subcommand("simulate", "integrate to blow-up and compare");
    add_common(simulate);
    auto* sweep = app.add_subcommand("sweep", "run one experiment per parameter value");
    add_common(sweep);
    sweep->add_option("--axis", axis, "parameter to vary: p, M or chi")->required();
    sweep->add_option("--values", values_csv, "comma-separated values")->required();
    auto* proptest = app.add_subcommand("proptest", "randomized inequality batches");
    add_common(proptest);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return fluxlim::exit_code::usage;
    }

    try {
        auto cfg = fluxlim::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

        if (validate->parsed()) return fluxlim::cmd_validate(cfg);
        if (certify->parsed()) return fluxlim::cmd_certify(cfg);
        if (simulate->parsed()) return fluxlim::cmd_simulate(cfg);
        if (sweep->parsed()) return fluxlim::cmd_sweep(cfg, axis, parse_values(values_csv));
        if (proptest->parsed()) return fluxlim::cmd_proptest(cfg);
    } catch (const fluxlim::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fluxlim::exit_code::usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fluxlim::exit_code::usage;
    }
    return fluxlim::exit_code::usage;
}
