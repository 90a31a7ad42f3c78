// rotorlab: command-line front end for the kicked-rotor experiments.
//
//   rotorlab run <preset|--config FILE> [--seed S] [--out DIR] [--kicks N] [--basis D]
//   rotorlab spectrum --tau T --k K --dim D --out DIR
//   rotorlab converge <preset|--config FILE> [--doublings N] [--kicks N] [--seed S]
//   rotorlab check
//   rotorlab presets
//
// Exit codes: 0 success, 1 usage, 2 numerical-guard failure, 3 acceptance failure.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "rotorlab/acceptance.hpp"
#include "rotorlab/experiments/config.hpp"
#include "rotorlab/experiments/convergence.hpp"
#include "rotorlab/experiments/preset.hpp"
#include "rotorlab/experiments/runner.hpp"

namespace {

constexpr int exit_usage = 1;
constexpr int exit_guard = 2;
constexpr int exit_acceptance = 3;

namespace ex = rotorlab::experiments;

ex::ExperimentPreset load_preset(const std::string& name, const std::string& config_path) {
    if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw rotorlab::ConfigError("cannot read config file " + config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        return ex::parse_config(ss.str());
    }
    if (name.empty()) throw rotorlab::ConfigError("give a preset name or --config FILE");
    return ex::make_preset(name);
}

void print_headline(const ex::RunOutput& out) { std::cout << out.summary(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotorlab: coherent control of kicked-rotor diffusion"};
    app.require_subcommand(1);

    std::string preset_name, config_path, out_dir;
    std::uint64_t seed = 0;
    std::optional<int> kicks, basis;

    auto* run = app.add_subcommand("run", "run a named preset or a config file");
    run->add_option("preset", preset_name, "preset name (see `rotorlab presets`)");
    run->add_option("--config", config_path, "key=value experiment file")->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "master seed for stochastic parts");
    run->add_option("--out", out_dir, "output directory (default out/<preset>)");
    run->add_option("--kicks", kicks, "override the kick count")->check(CLI::NonNegativeNumber);
    run->add_option("--basis", basis, "override the momentum basis size D")->check(CLI::PositiveNumber);

    double tau = 0.0, k = 0.0;
    int dim = 0;
    std::string spectrum_out;
    auto* spectrum = app.add_subcommand("spectrum", "diagonalize the Floquet matrix and export its spectrum");
    spectrum->add_option("--tau", tau, "kick period tau")->required();
    spectrum->add_option("--k", k, "kick strength k")->required();
    spectrum->add_option("--dim", dim, "basis dimension D (even, <= 512)")->required();
    spectrum->add_option("--out", spectrum_out, "output directory")->required();

    int doublings = 1;
    auto* converge = app.add_subcommand("converge", "re-run a preset with doubled resolution");
    converge->add_option("preset", preset_name, "preset name");
    converge->add_option("--config", config_path, "key=value experiment file")->check(CLI::ExistingFile);
    converge->add_option("--doublings", doublings, "number of doublings")->check(CLI::PositiveNumber);
    converge->add_option("--kicks", kicks, "override the kick count")->check(CLI::NonNegativeNumber);
    converge->add_option("--seed", seed, "master seed");

    auto* check = app.add_subcommand("check", "run the acceptance suite");
    auto* presets = app.add_subcommand("presets", "list the named presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (*presets) {
            for (const auto& n : ex::preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*check) {
            bool all = true;
            rotorlab::acceptance::run_all([&all](const rotorlab::acceptance::CriterionResult& r) {
                std::cout << rotorlab::acceptance::format_line(r) << std::endl;
                all = all && r.passed;
            });
            return all ? 0 : exit_acceptance;
        }
        if (*spectrum) {
            const auto out = ex::evaluate_spectrum(tau, k, dim);
            ex::write_outputs(out, spectrum_out);
            print_headline(out);
            return 0;
        }
        if (*converge) {
            const auto preset = load_preset(preset_name, config_path);
            const auto rep = ex::convergence_report(preset, doublings, seed, kicks);
            std::cout << rep.to_text();
            return 0;
        }
        if (*run) {
            const auto preset = load_preset(preset_name, config_path);
            ex::RunOverrides o;
            o.kicks = kicks;
            o.basis = basis;
            const std::uint64_t run_seed =
                config_path.empty() || run->count("--seed") || !preset.decoherence ? seed : preset.decoherence->seed;
            const auto out = ex::evaluate_preset(preset, run_seed, o);
            ex::write_outputs(out, out_dir.empty() ? "out/" + preset.name : out_dir);
            print_headline(out);
            return 0;
        }
    } catch (const rotorlab::BasisTooSmall& e) {
        std::cerr << "rotorlab: " << e.what() << "\n";
        return exit_guard;
    } catch (const rotorlab::ConfigError& e) {
        std::cerr << "rotorlab: config: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "rotorlab: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "rotorlab: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
