#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "nisakns/config.hpp"
#include "nisakns/io.hpp"
#include "nisakns/scenario.hpp"

using namespace nisakns;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string shipped(const std::string& name) { return read_file(std::string(NISAKNS_SOURCE_DIR) + "/configs/" + name); }

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("shipped MKdV scenario parses to the expected soliton parameters", "[config-io]") {
    const auto cfg = parse_config(shipped("mkdv_soliton.cfg"));
    CHECK(cfg.system.n == 2);
    CHECK(cfg.system.j == std::vector<cplx>{1.0, -1.0});
    CHECK(cfg.flow.order == 3);
    CHECK(cfg.darboux.kappa0 == 1.0);
    CHECK(cfg.darboux.c0 == -4.0);
    REQUIRE(cfg.darboux.second_lambda.has_value());
    CHECK(*cfg.darboux.second_lambda == cplx(-1.5));
    const auto setup = make_setup(cfg);
    REQUIRE(setup.spec.has_value());
    CHECK(setup.mkdv);
    CHECK(setup.spec->kappa0 == 1.0);
    CHECK(setup.spec->c0 == -4.0);
    CHECK(setup.spec->grid.nx() == 2001);
}

TEST_CASE("emitted MKdV scenario matches the golden file", "[config-io]") {
    const auto cfg = parse_config(shipped("mkdv_soliton.cfg"));
    CHECK(emit_config(cfg) == read_file(std::string(NISAKNS_TEST_DATA) + "/mkdv_soliton.canonical.cfg"));
}

TEST_CASE("parse and emit round trip", "[config-io]") {
    for (const char* name : {"mkdv_soliton.cfg", "gaussian_hierarchy.cfg", "su3_darboux.cfg"}) {
        const auto cfg = parse_config(shipped(name));
        const std::string text = emit_config(cfg);
        const auto again = parse_config(text);
        CHECK(again == cfg);
        CHECK(emit_config(again) == text);
    }
}

TEST_CASE("complex values in all accepted spellings", "[config-io]") {
    const std::string base = "[system]\nN = 2\nJ = 1, -1\n[flow]\nn = 2\nf = 0, 0, 1\n[grid]\nnx = 101\n[darboux]\nlambda = ";
    const auto cfg = parse_config(base + "-1.5-2i, 0.5+1e-1i\n");
    REQUIRE(cfg.darboux.lambdas.size() == 2);
    CHECK(cfg.darboux.lambdas[0] == cplx(-1.5, -2.0));
    CHECK(cfg.darboux.lambdas[1] == cplx(0.5, 0.1));
    CHECK(parse_config(base + "2i, -3\n").darboux.lambdas[0] == cplx(0.0, 2.0));
    CHECK_THAT(config_error(base + "1+2j, 3\n"), ContainsSubstring("line 10"));
}

TEST_CASE("configuration diagnostics", "[config-io]") {
    CHECK_THAT(config_error(""), ContainsSubstring("missing section: system"));
    const std::string mkdv = shipped("mkdv_soliton.cfg");

    std::string equal_j = mkdv;
    equal_j.replace(equal_j.find("J = 1, -1"), 9, "J = 1, 1, -2");
    equal_j.replace(equal_j.find("N = 2"), 5, "N = 3");
    CHECK_THAT(config_error(equal_j), ContainsSubstring("pairwise distinct"));

    std::string typo = mkdv;
    typo.replace(typo.find("\nkappa0") + 1, 6, "kapa0");
    const std::string msg = config_error(typo);
    CHECK_THAT(msg, ContainsSubstring("kapa0"));
    CHECK_THAT(msg, ContainsSubstring("did you mean 'kappa0'"));

    std::string section = mkdv;
    section.replace(section.find("[darboux]"), 9, "[darbux]");
    CHECK_THAT(config_error(section), ContainsSubstring("did you mean [darboux]"));

    std::string degree = mkdv;
    degree.replace(degree.find("f = 0, 0, 0, 1"), 14, "f = 0, 0, 0, 0, 0, 0, 1");
    CHECK_THAT(config_error(degree), ContainsSubstring("exceeds n + 2"));

    std::string trace = mkdv;
    trace.replace(trace.find("alpha_3 = -4, 4"), 15, "alpha_3 = -4, 3");
    CHECK_THAT(config_error(trace), ContainsSubstring("trace-free"));
}

TEST_CASE("CSV schema and number format", "[config-io]") {
    const Grid g(0.0, 1.0, 9, {0.0, 0.5});
    FieldGrid f(g, 2);
    f.set(1, 8, SquareMatrix(2, {0.0, cplx(0.1, -2.0), 1.0 / 3.0, 0.0}));
    const std::string csv = field_csv(g, matrix_columns("S", f));
    const auto first_line = csv.substr(0, csv.find('\n'));
    CHECK(first_line == "x,t,re_S_11,im_S_11,re_S_12,im_S_12,re_S_21,im_S_21,re_S_22,im_S_22");
    const auto table = parse_csv(csv, "memory");
    REQUIRE(table.rows.size() == 18);
    CHECK(table.rows[17][table.column("re_S_21")] == 1.0 / 3.0);
    CHECK(table.rows[17][table.column("im_S_12")] == -2.0);
    CHECK(table.rows[9][table.column("t")] == 0.5);
    CHECK(csv.find(",0.3333333333333333,") != std::string::npos);
}

TEST_CASE("CSV output does not depend on the thread count", "[config-io]") {
    const auto cfg = parse_config(shipped("mkdv_soliton.cfg"));
    ::setenv("NISAKNS_THREADS", "1", 1);
    const auto a = run_scenario(cfg, Command::darboux);
    ::setenv("NISAKNS_THREADS", "4", 1);
    const auto b = run_scenario(cfg, Command::darboux);
    ::unsetenv("NISAKNS_THREADS");
    CHECK(a.files.files() == b.files.files());
}

TEST_CASE("empty or malformed field files are rejected", "[config-io]") {
    CHECK_THROWS_AS(parse_csv("", "empty"), Error);
    CHECK_THROWS_AS(parse_csv("x,t\n", "header only"), Error);
    CHECK_THROWS_AS(parse_csv("x,t\n1,abc\n", "bad"), Error);
    CHECK_THROWS_AS(read_csv("/nonexistent/field.csv"), Error);
}

TEST_CASE("plot script: one curve per time sample and the fitted slope", "[config-io]") {
    const Grid g(-1.0, 1.0, 9, {0.0, 0.1, 0.2});
    const auto table = parse_csv(field_csv(g, scalar_columns("u", std::vector<double>(27, 1.0))), "memory");
    const StudySeries study{"residual", {0.04, 0.02, 0.01}, {3.2e-3, 8e-4, 2e-4}};
    const std::string script = plot_script(table, "re_u", {study}, "soliton");
    CHECK_THAT(script, ContainsSubstring("$curve2 using 1:2"));
    CHECK_THAT(script, !ContainsSubstring("$curve3"));
    CHECK_THAT(script, ContainsSubstring("residual (slope 2.000)"));
    CHECK_THAT(script, ContainsSubstring("set logscale xy"));
    CHECK_THROWS_AS(plot_script(table, "re_v", {}, "soliton"), Error);
}

TEST_CASE("verify report for the shipped scenario is all green and reproducible", "[config-io]") {
    const auto cfg = parse_config(shipped("mkdv_soliton.cfg"));
    const auto a = run_scenario(cfg, Command::verify);
    CHECK(a.passed);
    CHECK(a.failures.empty());
    const auto b = run_scenario(cfg, Command::verify);
    CHECK(a.files.files() == b.files.files());
    std::vector<std::string> names;
    for (const auto& c : a.report["checks"]) names.push_back(c["name"]);
    for (const char* expected : {"g_identity", "beta_table", "dressing_closed_form", "dual_route", "spectral_flow_rk4",
                                 "zero_curvature_order", "constant_shift_recovery", "asymptotic_diag_rate",
                                 "recurrence_coefficient_order", "governing_relation", "two_soliton_reduction",
                                 "mkdv_recurrence_order"})
        CHECK(std::find(names.begin(), names.end(), expected) != names.end());
    CHECK(a.report.contains("evolution_residual"));
    CHECK(a.report.contains("printed_equation_terms"));
}

TEST_CASE("output formats select the written files", "[config-io]") {
    auto cfg = parse_config(shipped("mkdv_soliton.cfg"));
    cfg.output.formats = {"json"};
    const auto r = run_scenario(cfg, Command::soliton);
    CHECK(r.files.files().count("soliton_report.json") == 1);
    CHECK(r.files.files().count("soliton.csv") == 0);
}
