#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "optocool/optocool.hpp"

namespace {

struct Common {
    std::string scenario;
    std::string output;
    std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
    sub->add_option("--output,-o", c.output, "Write the table here instead of stdout");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

int emit(const optocool::CommandOutput& out, const Common& c) {
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
    const auto fmt = optocool::format_from_string(c.format);
    if (c.output.empty()) {
        optocool::write_table(std::cout, out.table, fmt);
    } else {
        std::ofstream f(c.output);
        if (!f) throw optocool::InputError("cannot write '" + c.output + "'");
        optocool::write_table(f, out.table, fmt);
    }
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optocool: cavity-free optomechanical cooling by a remote atom cloud"};
    app.require_subcommand(1);
    Common common;

    auto* spectrum = app.add_subcommand("spectrum", "Spectral factor J(omega) over a range of omega/nu");
    double omega_min = -3.0, omega_max = 3.0;
    std::size_t spectrum_points = 601;
    std::string normalize = "plus";
    add_common(spectrum, common);
    spectrum->add_option("--omega-min", omega_min, "Lower end, units of nu")->capture_default_str();
    spectrum->add_option("--omega-max", omega_max, "Upper end, units of nu")->capture_default_str();
    spectrum->add_option("--points", spectrum_points, "Number of samples")->capture_default_str();
    spectrum->add_option("--normalize", normalize, "Divide by |J(nu)|, |J(-nu)| or nothing")
        ->check(CLI::IsMember({"plus", "minus", "none"}))
        ->capture_default_str();

    auto* steady = app.add_subcommand("steady", "Rates and steady-state phonon number");
    add_common(steady, common);

    auto* evolve = app.add_subcommand("evolve", "Phonon number versus time");
    std::optional<double> n0;
    double t_max = 0.0;
    std::size_t evolve_points = 201;
    add_common(evolve, common);
    evolve->add_option("--n0", n0, "Initial phonon number (default: thermal occupation)");
    evolve->add_option("--t-max", t_max, "End time in seconds")->required();
    evolve->add_option("--points", evolve_points, "Number of samples")->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Grid sweep over scenario parameters");
    std::vector<std::string> axis_specs;
    std::size_t threads = 0;
    add_common(sweep, common);
    sweep->add_option("--axis", axis_specs, "PATH=LO:HI:N or PATH=V1,V2,... (repeatable)");
    sweep->add_option("--threads", threads, "Worker threads (0: automatic, capped by OPTOCOOL_THREADS)");

    auto* optimize = app.add_subcommand("optimize", "Minimise the steady-state phonon number");
    std::vector<std::string> free_specs;
    add_common(optimize, common);
    optimize->add_option("--free", free_specs, "PATH=LO:HI or PATH=V1,V2,... (repeatable)")->required();

    auto* design = app.add_subcommand("design", "Detuning and placement for a cooling strategy");
    std::string strategy;
    std::int64_t index = 0;
    add_common(design, common);
    design->add_option("--strategy", strategy, "bs or tms (default: the scenario's placement strategy)")
        ->check(CLI::IsMember({"bs", "tms"}));
    design->add_option("--index", index, "Placement index k")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : optocool::kExitInput;
    }

    try {
        const auto file = optocool::load_scenario_file(common.scenario);
        if (spectrum->parsed()) {
            return emit(optocool::cmd_spectrum(file, omega_min, omega_max, spectrum_points,
                                               optocool::normalization_from_string(normalize)),
                        common);
        }
        if (steady->parsed()) return emit(optocool::cmd_steady(file), common);
        if (evolve->parsed()) return emit(optocool::cmd_evolve(file, n0, t_max, evolve_points), common);
        if (sweep->parsed()) {
            std::vector<optocool::Axis> axes;
            for (const auto& s : axis_specs) axes.push_back(optocool::parse_axis_spec(s));
            optocool::SweepOptions opts;
            opts.threads = threads;
            return emit(optocool::cmd_sweep(file, axes, opts), common);
        }
        if (optimize->parsed()) {
            std::vector<optocool::FreeParameter> free;
            for (const auto& s : free_specs) free.push_back(optocool::parse_free_spec(s));
            return emit(optocool::cmd_optimize(file, free), common);
        }
        std::optional<optocool::StrategyKind> kind;
        if (!strategy.empty()) kind = optocool::strategy_from_string(strategy);
        return emit(optocool::cmd_design(file, kind, index), common);
    } catch (const std::exception& e) {
        const int rc = optocool::exit_code_for(std::current_exception());
        std::cerr << "optocool: " << e.what() << '\n';
        if (rc == optocool::kExitInput && (sweep->parsed() || optimize->parsed())) {
            std::cerr << "\n" << (sweep->parsed() ? sweep->help() : optimize->help());
        }
        return rc;
    }
}
