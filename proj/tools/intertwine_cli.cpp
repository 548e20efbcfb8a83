#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "intertwine/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void print_report(const itw::ScenarioResult& res) {
    for (const auto& rep : res.reports) {
        for (const auto& e : rep.residuals) {
            std::printf("[%s] %s/%s = %.6g (tol %.6g)%s%s\n", e.pass ? "PASS" : "FAIL",
                        rep.scenario.c_str(), e.name.c_str(), e.value, e.tolerance,
                        e.note.empty() ? "" : "  # ", e.note.c_str());
        }
        for (const auto& c : rep.convergence) {
            std::printf("[%s] %s/order %s = %.3f (expected %.2f, coarse %.3e -> fine %.3e)\n",
                        c.pass ? "PASS" : "FAIL", rep.scenario.c_str(), c.levels.c_str(),
                        c.observed_order, c.expected_order, c.coarse, c.fine);
        }
        if (rep.kernel_element)
            std::printf("[note] %s: source lies in the charge kernel\n", rep.scenario.c_str());
    }
    std::printf("scenario %s: %s\n", res.name.c_str(), res.passed() ? "PASS" : "FAIL");
}

void write_outputs(const itw::ScenarioResult& res, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& f : res.fields) {
        std::ofstream os(dir / (f.first + ".csv"), std::ios::binary);
        itw::write_field_csv(f.second, os);
    }
    {
        std::ofstream os(dir / "report.json", std::ios::binary);
        itw::write_report_json(res, os);
    }
    {
        std::ofstream os(dir / "plot.gp", std::ios::binary);
        itw::write_plot_script(res, os);
    }
}

int run_text(const std::string& text, const std::string& label, const std::string& out_dir,
             std::optional<double> tol, const std::string& config_copy) {
    try {
        itw::ScenarioResult res = itw::run_scenario(text, label, tol);
        print_report(res);
        if (!out_dir.empty()) {
            const fs::path dir(out_dir);
            write_outputs(res, dir);
            if (!config_copy.empty()) {
                std::ofstream os(dir / "config.json", std::ios::binary);
                os << config_copy;
            }
            std::printf("outputs written to %s\n", dir.string().c_str());
        }
        return res.passed() ? kExitPass : kExitCheckFailed;
    } catch (const itw::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const itw::LabError& e) {
        std::cerr << "runtime rejection: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for intertwined potential pairs"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "run a scenario config file");
    run->add_option("config", config_path, "path to a scenario JSON file")->required();
    run->add_option("--out", out_dir, "directory for CSV/report/plot outputs");

    auto* list = app.add_subcommand("list", "list the built-in scenarios");

    std::string name;
    double tol_value = 0.0;
    auto* verify = app.add_subcommand("verify", "run a built-in scenario without writing files");
    verify->add_option("name", name, "built-in scenario name")->required();
    auto* tol_opt =
        verify->add_option("--tol", tol_value, "override every check tolerance in the scenario");

    std::string export_out;
    auto* exp = app.add_subcommand("export", "run a built-in scenario and write its artifacts");
    exp->add_option("name", name, "built-in scenario name")->required();
    exp->add_option("--out", export_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (list->parsed()) {
        for (const auto& n : itw::builtin_scenario_names())
            std::printf("%-28s %s\n", n.c_str(), itw::builtin_scenario_summary(n).c_str());
        return kExitPass;
    }

    if (run->parsed()) {
        std::ifstream is(config_path, std::ios::binary);
        if (!is) {
            std::cerr << config_path << ": cannot read config file\n";
            return kExitConfig;
        }
        std::ostringstream buf;
        buf << is.rdbuf();
        return run_text(buf.str(), config_path, out_dir, std::nullopt, "");
    }

    if (!itw::is_builtin_scenario(name)) {
        std::cerr << "unknown scenario \"" << name << "\"; available:\n";
        for (const auto& n : itw::builtin_scenario_names()) std::cerr << "  " << n << "\n";
        return kExitConfig;
    }
    const std::string text = itw::builtin_scenario_text(name);

    if (verify->parsed()) {
        std::optional<double> tol;
        if (tol_opt->count() > 0) tol = tol_value;
        return run_text(text, name, "", tol, "");
    }
    return run_text(text, name, export_out, std::nullopt, text);
}
