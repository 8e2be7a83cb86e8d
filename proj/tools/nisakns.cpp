// nisakns: scenario runner for the non-isospectral AKNS toolkit.
//
//   nisakns verify --config configs/mkdv_soliton.cfg --out out
//   nisakns plot --input out/soliton.csv --study out/study.json --out out
//
// Exit codes: 0 success, 1 failed check or module error, 2 configuration or
// usage error.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nisakns/config.hpp"
#include "nisakns/error.hpp"
#include "nisakns/io.hpp"
#include "nisakns/scenario.hpp"

namespace fs = std::filesystem;
using namespace nisakns;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check = 1;
constexpr int exit_config = 2;

struct Args {
    std::string config;
    std::string out;
    double tolerance_scale = 1.0;
    std::size_t grid_refine = 0;
    std::string input;
    std::string column = "re_u";
    std::string study;
};

void print_checks(const json& report) {
    if (!report.contains("checks")) return;
    for (const auto& c : report["checks"]) {
        const char* tag = c["passed"].get<bool>() ? "PASS" : (c["gating"].get<bool>() ? "FAIL" : "INFO");
        std::printf("%-4s %-36s", tag, c["name"].get<std::string>().c_str());
        if (c.contains("value")) std::printf(" value=%.6g", c["value"].get<double>());
        if (c.contains("threshold")) std::printf(" threshold=%.3g", c["threshold"].get<double>());
        if (c.contains("range")) std::printf(" range=[%.3g, %.3g]", c["range"][0].get<double>(), c["range"][1].get<double>());
        std::printf("\n");
    }
}

int run_command(Command command, const Args& a) {
    const ScenarioConfig cfg = parse_config(read_file(a.config));
    RunOptions opt;
    opt.tolerance_scale = a.tolerance_scale;
    if (a.grid_refine) opt.grid_refine = a.grid_refine;
    const ScenarioResult r = run_scenario(cfg, command, opt);
    const fs::path dir = a.out.empty() ? fs::path(cfg.output.directory) : fs::path(a.out);
    r.files.write(dir);
    print_checks(r.report);
    for (const auto& [name, content] : r.files.files()) std::printf("wrote %s\n", (dir / name).string().c_str());
    if (!r.passed) {
        std::string names;
        for (const auto& f : r.failures) names += (names.empty() ? "" : ", ") + f;
        std::fprintf(stderr, "failed checks: %s\n", names.c_str());
        return exit_check;
    }
    return exit_ok;
}

int run_plot(const Args& a) {
    const CsvTable field = read_csv(a.input);
    std::vector<StudySeries> studies;
    if (!a.study.empty()) {
        const json doc = json::parse(read_file(a.study));
        for (const auto& s : doc.at("series"))
            studies.push_back({s.at("name").get<std::string>(), s.at("h").get<std::vector<double>>(),
                               s.at("residual").get<std::vector<double>>()});
    }
    const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
    const std::string stem = fs::path(a.input).stem().string();
    OutputSet out;
    out.add(stem + ".gp", plot_script(field, a.column, studies, stem));
    out.write(dir);
    std::printf("wrote %s\n", (dir / (stem + ".gp")).string().c_str());
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-isospectral AKNS hierarchy, Darboux transformation and MKdV soliton toolkit"};
    app.require_subcommand(1);
    Args a;

    const std::vector<std::pair<const char*, const char*>> commands{
        {"hierarchy", "build V_i from the configured potential"},
        {"darboux", "dress the seed and write S, P', V' and the constant shift"},
        {"soliton", "MKdV 1-soliton (and 2-soliton) against the closed form"},
        {"verify", "run every check and write the residual report"}};
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        auto* s = app.add_subcommand(name, help);
        s->add_option("--config", a.config, "scenario file")->required()->check(CLI::ExistingFile);
        s->add_option("--out", a.out, "output directory (overrides output.directory)");
        s->add_option("--tolerance-scale", a.tolerance_scale, "multiplies every absolute threshold")
            ->check(CLI::PositiveNumber);
        s->add_option("--grid-refine", a.grid_refine, "nested grid levels for order studies")
            ->check(CLI::Range(2, 12));
        subs.push_back(s);
    }
    auto* plot = app.add_subcommand("plot", "gnuplot script for a field CSV and optional study JSON");
    plot->add_option("--input", a.input, "field CSV")->required();
    plot->add_option("--column", a.column, "column to draw")->capture_default_str();
    plot->add_option("--study", a.study, "study JSON written by soliton or verify");
    plot->add_option("--out", a.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return run_command(static_cast<Command>(i), a);
        return run_plot(a);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return exit_config;
    } catch (const Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return e.kind() == ErrorKind::config ? exit_config : exit_check;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_check;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_check;
    }
}
