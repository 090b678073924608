#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "shearmix/cli.hpp"
#include "shearmix/csv_io.hpp"

using namespace shearmix;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace

TEST_CASE("parse_cli: subcommand with flags") {
    const ParseOutcome out = parse_cli({"mix", "--seed", "7", "--samples", "100"});
    REQUIRE(out.should_run);
    CHECK(out.exit_code == kExitOk);
    CHECK(out.cfg.subcommand == "mix");
    CHECK(out.cfg.seed == 7);
    CHECK(out.cfg.samples == 100);
    CHECK(out.cfg.steps == 25);
    CHECK(out.cfg.grid == 256);
    CHECK(out.cfg.p == 0.1);
    CHECK(out.cfg.effective_delta() == 0.05);
}

TEST_CASE("parse_cli: usage and validation exit codes") {
    // no arguments: usage, exit 2
    const ParseOutcome none = parse_cli({});
    CHECK(none.exit_code == kExitUsage);
    CHECK(!none.should_run);
    CHECK(none.message.find("Usage") != std::string::npos);

    // unknown subcommand
    const ParseOutcome bad = parse_cli({"frobnicate"});
    CHECK(bad.exit_code == kExitUsage);

    // unknown flag
    const ParseOutcome flag = parse_cli({"mix", "--frob", "1"});
    CHECK(flag.exit_code == kExitUsage);

    // range validation failure names the key
    const ParseOutcome p = parse_cli({"mix", "--p", "2.0"});
    CHECK(p.exit_code == kExitValidation);
    CHECK(p.message.find("p") != std::string::npos);

    const ParseOutcome grid = parse_cli({"mix", "--grid", "100"});
    CHECK(grid.exit_code == kExitValidation);
    CHECK(grid.message.find("grid") != std::string::npos);

    const ParseOutcome eps = parse_cli({"mix", "--eps", "0.3"});
    CHECK(eps.exit_code == kExitValidation);

    // non-numeric value
    const ParseOutcome conv = parse_cli({"mix", "--samples", "abc"});
    CHECK(conv.exit_code == kExitValidation);
}

TEST_CASE("load_config: values, comments, unknown keys, line numbers") {
    write_file("cfg_ok.cfg", "p = 0.1\nsamples = 200\n# comment\n\nsteps=12\n");
    const auto kv = load_config("cfg_ok.cfg");
    REQUIRE(kv.size() == 3);
    CHECK(kv[0].first == "p");
    CHECK(kv[0].second == "0.1");
    CHECK(kv[2].second == "12");

    write_file("cfg_unknown.cfg", "unknown_key = 1\n");
    try {
        (void)load_config("cfg_unknown.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.message.find("unknown_key") != std::string::npos);
    }

    write_file("cfg_badline.cfg", "p = 0.1\nnot a kv pair\n");
    try {
        (void)load_config("cfg_badline.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }

    write_file("cfg_empty.cfg", "");
    CHECK(load_config("cfg_empty.cfg").empty());

    std::remove("cfg_ok.cfg");
    std::remove("cfg_unknown.cfg");
    std::remove("cfg_badline.cfg");
    std::remove("cfg_empty.cfg");
}

TEST_CASE("config file values merge under CLI overrides") {
    write_file("cfg_merge.cfg", "p = 0.2\nsamples = 64\nsteps = 9\n");
    const ParseOutcome out =
        parse_cli({"mix", "--config", "cfg_merge.cfg", "--samples", "32"});
    REQUIRE(out.should_run);
    CHECK(out.cfg.p == 0.2);
    CHECK(out.cfg.samples == 32);  // CLI wins
    CHECK(out.cfg.steps == 9);
    CHECK(out.cfg.effective_delta() == 0.1);

    // unknown key in config: validation error listing it
    write_file("cfg_bad.cfg", "nope = 3\n");
    const ParseOutcome bad = parse_cli({"mix", "--config", "cfg_bad.cfg"});
    CHECK(bad.exit_code == kExitValidation);
    CHECK(bad.message.find("nope") != std::string::npos);
    std::remove("cfg_merge.cfg");
    std::remove("cfg_bad.cfg");
}

TEST_CASE("run_cli writes deterministic outputs") {
    RunConfig rc;
    rc.subcommand = "mix";
    rc.out_dir = "cli_out_a";
    rc.seed = 5;
    rc.samples = 4;
    rc.steps = 4;
    rc.grid = 32;
    rc.workers = 2;
    REQUIRE(run_cli(rc) == kExitOk);
    REQUIRE(std::filesystem::exists("cli_out_a/mix_trace.csv"));
    REQUIRE(std::filesystem::exists("cli_out_a/mix_report.csv"));
    REQUIRE(std::filesystem::exists("cli_out_a/mix_manifest.txt"));
    REQUIRE(std::filesystem::exists("cli_out_a/mix_field.csv"));

    const std::string trace = slurp("cli_out_a/mix_trace.csv");
    CHECK(trace.rfind("n,mean,stderr,count\n", 0) == 0);
    CHECK(trace.find("\r") == std::string::npos);

    // rerun with the same seed/config into another dir: byte-identical CSVs
    RunConfig rc2 = rc;
    rc2.out_dir = "cli_out_b";
    rc2.workers = 1;  // worker count must not change results
    REQUIRE(run_cli(rc2) == kExitOk);
    CHECK(slurp("cli_out_b/mix_trace.csv") == trace);
    CHECK(slurp("cli_out_b/mix_report.csv") == slurp("cli_out_a/mix_report.csv"));
    CHECK(slurp("cli_out_b/mix_field.csv") == slurp("cli_out_a/mix_field.csv"));

    // nested missing output directory is created recursively
    RunConfig rc3 = rc;
    rc3.out_dir = "cli_out_c/deep/nested";
    REQUIRE(run_cli(rc3) == kExitOk);
    CHECK(std::filesystem::exists("cli_out_c/deep/nested/mix_trace.csv"));

    std::filesystem::remove_all("cli_out_a");
    std::filesystem::remove_all("cli_out_b");
    std::filesystem::remove_all("cli_out_c");
}

TEST_CASE("fmt_double round-trips 17 significant digits") {
    for (double v : {0.1, 1.0 / 3.0, 2.5e-17, 123456.789, 6.283185307179586}) {
        const std::string s = fmt_double(v);
        CHECK(std::stod(s) == v);
    }
}
