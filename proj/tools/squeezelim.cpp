#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "squeezelim/figures.hpp"
#include "squeezelim/scenario.hpp"

namespace fs = std::filesystem;
using namespace squeezelim;

namespace
{

int run_config(const std::string& path, const std::string& out_override)
{
    const auto cfg = scenario::load_config(path);
    const auto result = scenario::run(cfg);
    const std::string out = out_override.empty() ? cfg.output_path : out_override;
    if (out.empty() || out == "-") {
        scenario::write_output(std::cout, cfg, result);
        return 0;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw scenario::ConfigError("cannot write output file '" + out + "'");
    scenario::write_output(f, cfg, result);
    return 0;
}

int write_figures(const std::string& name, const std::string& dir)
{
    fs::create_directories(dir);
    const auto all = name == "all" ? figures::names() : std::vector<std::string>{name};
    for (const auto& n : all) {
        for (const auto& [file, table] : figures::figure(n)) {
            const auto path = fs::path(dir) / file;
            std::ofstream f(path, std::ios::binary);
            if (!f) throw scenario::ConfigError("cannot write '" + path.string() + "'");
            write_csv(f, table);
            std::cout << path.string() << '\n';
        }
    }
    return 0;
}

struct LimitArgs
{
    CavityParams cavity;
    double sqz_db = 0.0;
    double zeta = 1.0;
    double q = 0.0;
    double omega = 0.0;
};

int print_limits(const LimitArgs& a)
{
    const SqueezeSettings s{a.q, db_to_power(a.sqz_db), a.zeta};
    ensure_valid(a.cavity, s);
    const auto& p = a.cavity;
    nlohmann::json doc;
    doc["squeezelim"] = version;
    doc["inputs"] = {{"t_c", p.t_c},   {"eps_int", p.eps_int}, {"eps_read", p.eps_read}, {"eps_inj", p.eps_inj},
                     {"tau", p.tau},   {"length", p.length},   {"power", p.power},       {"wavelength", p.wavelength},
                     {"sqz_db", a.sqz_db}, {"beta", round_12(s.beta)}, {"zeta", a.zeta}, {"q", a.q}, {"omega", a.omega}};
    doc["limits"] = scenario::limits_json(single_mode::limit_report(p, s, a.omega));
    std::cout << doc.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum-noise limits of a cavity sensor with internal squeezing, external squeezing and output "
                 "amplification"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);

    std::string config_path, out_override;
    auto* run = app.add_subcommand("run", "Evaluate a JSON scenario configuration");
    run->add_option("config", config_path, "Configuration file")->required();
    run->add_option("--out", out_override, "Output file (overrides output.path; '-' for stdout)");

    std::string figure_name, figure_dir;
    auto* fig = app.add_subcommand("figure", "Write the built-in figure datasets as CSV");
    fig->add_option("name", figure_name, "fig2, fig3, fig4, fig5 or all")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5", "all"}));
    fig->add_option("--out", figure_dir, "Output directory")->required();

    LimitArgs la;
    auto* lim = app.add_subcommand("limits", "Print the analytic limits for one parameter set as JSON");
    lim->add_option("--tc", la.cavity.t_c, "Coupling-mirror power transmissivity")->required();
    lim->add_option("--eps-int", la.cavity.eps_int, "Internal loss")->required();
    lim->add_option("--eps-read", la.cavity.eps_read, "Readout loss")->required();
    lim->add_option("--sqz-db", la.sqz_db, "External squeezing [dB]")->required();
    lim->add_option("--eps-inj", la.cavity.eps_inj, "Injection loss");
    lim->add_option("--zeta", la.zeta, "Output amplification (power)");
    lim->add_option("--q", la.q, "Internal gain for the gain-dependent entries");
    lim->add_option("--omega", la.omega, "Sideband frequency [rad/s]");
    lim->add_option("--tau", la.cavity.tau, "Single-pass time [s]");
    lim->add_option("--length", la.cavity.length, "Arm length [m]");
    lim->add_option("--power", la.cavity.power, "Intracavity power [W]");
    lim->add_option("--wavelength", la.cavity.wavelength, "Carrier wavelength [m]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run) return run_config(config_path, out_override);
        if (*fig) return write_figures(figure_name, figure_dir);
        if (*lim) return print_limits(la);
    } catch (const scenario::RunError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code;
    } catch (const scenario::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ThresholdError& e) {
        std::cerr << "threshold: " << e.what() << '\n';
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return 2;
    } catch (const BracketError& e) {
        std::cerr << "no bracket: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
