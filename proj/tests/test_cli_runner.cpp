#include "nlsball/config.hpp"
#include "nlsball/errors.hpp"
#include "nlsball/output.hpp"
#include "nlsball/runner.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace nlsball;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("nlsball_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const fs::path p = dir / "config.json";
    std::ofstream(p) << text;
    return p;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(NLSBALL_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string validation_message(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Config, MinimalConfigFillsDefaults)
{
    const auto cfg = parse_config(R"({"command": "simulate-sde", "dim": 6})");
    EXPECT_EQ(cfg.command, Command::SimulateSde);
    EXPECT_EQ(cfg.dim, 6u);
    EXPECT_EQ(cfg.sde.sde.dissipation.q, 3.0);
    EXPECT_EQ(cfg.sde.sde.dissipation.beta, 1.2);
    EXPECT_EQ(cfg.sde.sde.alpha, 0.1);
    EXPECT_EQ(cfg.sde.sde.dissipation.xi, Gauge::Sqrt);
    EXPECT_NEAR(cfg.sde.sde.dissipation.rho(2.0), 12.0, 1e-15); // rho(x) = 3x^2
    ASSERT_EQ(cfg.sde.sde.noise.dim(), 6u);
    for (std::size_t n = 1; n <= 6; ++n)
        EXPECT_NEAR(std::abs(cfg.sde.sde.noise.amplitudes[n - 1]), 1.0 / (n * n), 1e-16);
    EXPECT_EQ(cfg.canonical["q"], 3.0);
    EXPECT_EQ(cfg.canonical["dissipation"]["beta"], 1.2);
}

TEST(Config, SubcriticalBetaAboveThreeHalvesRejected)
{
    const auto msg = validation_message(
        R"({"command": "simulate-sde", "dissipation": {"variant": "subcritical", "beta": 2}})");
    EXPECT_NE(msg.find("beta"), std::string::npos) << msg;
}

TEST(Config, SupercriticalNeedsQAboveTwo)
{
    const auto msg = validation_message(
        R"({"command": "simulate-sde", "q": 1.5, "dissipation": {"variant": "supercritical", "beta": 1.05}})");
    EXPECT_NE(msg.find("q > 2"), std::string::npos) << msg;
}

TEST(Config, UnknownKeysAreErrors)
{
    auto msg = validation_message(R"({"command": "simulate-det", "flow": {"dtt": 0.1}})");
    EXPECT_NE(msg.find("flow.dtt"), std::string::npos) << msg;
    msg = validation_message(R"({"command": "simulate-det", "sedd": 1})");
    EXPECT_NE(msg.find("sedd"), std::string::npos) << msg;
}

TEST(Config, ParseErrorsCarryPosition)
{
    const auto msg = validation_message("{\n  \"command\": \"simulate-det\",\n  \"dim\": 8,,\n}");
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, UnknownCommandAndBadTypes)
{
    EXPECT_FALSE(validation_message(R"({"command": "simulate"})").empty());
    EXPECT_FALSE(validation_message(R"({"command": "simulate-det", "dim": "eight"})").empty());
    EXPECT_FALSE(validation_message(R"({"dim": 8})").empty());
    EXPECT_FALSE(validation_message(R"({"command": "simulate-sde", "sde": {"alpha": 1.5}})").empty());
    EXPECT_FALSE(validation_message(R"({"command": "simulate-det", "flow": {"dt": -1}})").empty());
}

TEST(Config, HashTracksContentNotExecution)
{
    const auto a = parse_config(R"({"command": "simulate-det", "dim": 8})");
    const auto b = parse_config(R"({"dim": 8, "command": "simulate-det", "q": 3})");
    EXPECT_EQ(a.hash, b.hash);
    const auto c = parse_config(R"({"command": "simulate-det", "dim": 8, "workers": 4, "output_dir": "x"})");
    EXPECT_EQ(a.hash, c.hash);
    EXPECT_EQ(c.workers, 4u);
    const auto d = parse_config(R"({"command": "simulate-det", "dim": 8, "seed": 1})");
    EXPECT_NE(a.hash, d.hash);
    ConfigOverrides ov;
    ov.seed = 1;
    EXPECT_EQ(parse_config(R"({"command": "simulate-det", "dim": 8})", ov).hash, d.hash);
}

TEST(Config, Fnv1a)
{
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Output, CsvFormatting)
{
    std::ostringstream os;
    CsvWriter w(os, {"name", "value"}, 0xabcULL);
    w.row({std::string("a,b"), 0.1});
    w.row({std::string("say \"hi\""), std::int64_t{-3}});
    EXPECT_EQ(os.str(),
              "name,value,config_hash,artifact_version\r\n"
              "\"a,b\",0.1,0000000000000abc,1.0.0\r\n"
              "\"say \"\"hi\"\"\",-3,0000000000000abc,1.0.0\r\n");
    EXPECT_THROW(w.row({0.5}), std::invalid_argument);
}

TEST(Output, ShortestRoundTripDoubles)
{
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5})
        EXPECT_EQ(std::stod(format_double(x)), x);
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(Runner, ConservationCheckDecidesExitCode)
{
    const auto dir = scratch("conservation");
    const std::string base = R"({"command": "simulate-det", "dim": 16, "output_dir": ")" + dir.string() +
                             R"(", "flow": {"dt": 1e-4, "T": 0.1, "check_conservation": true, )";
    std::ostringstream log;
    auto ok = run(parse_config(base + R"("conservation_tolerance": 1e-6}})"), log);
    EXPECT_EQ(ok.exit_code, ExitSuccess) << ok.message;
    EXPECT_FALSE(fs::exists(dir / "error.json"));
    auto bad = run(parse_config(base + R"("conservation_tolerance": 1e-18}})"), log);
    EXPECT_EQ(bad.exit_code, ExitDivergence);
    const auto err = nlohmann::json::parse(slurp(dir / "error.json"));
    EXPECT_EQ(err["error"], "conservation");
    EXPECT_EQ(err["exit_code"], 3);
}

TEST(Runner, ArtifactsCarryProvenance)
{
    const auto dir = scratch("provenance");
    const auto cfg = parse_config(R"({"command": "simulate-sde", "dim": 4, "output_dir": ")" + dir.string() +
                                  R"(", "sde": {"T": 0.05, "trajectories": 4}})");
    std::ostringstream log;
    const auto res = run(cfg, log);
    ASSERT_EQ(res.exit_code, ExitSuccess) << res.message;
    const std::string hash = format_hash(cfg.hash);
    for (const auto& a : res.artifacts) {
        const std::string body = slurp(dir / a);
        if (a.extension() == ".csv") {
            EXPECT_EQ(body.substr(0, body.find("\r\n")).find("config_hash,artifact_version"),
                      body.find("\r\n") - std::string("config_hash,artifact_version").size());
            EXPECT_NE(body.find(hash + ",1.0.0\r\n"), std::string::npos) << a;
        } else if (a.extension() == ".json") {
            const auto j = nlohmann::ordered_json::parse(body);
            EXPECT_EQ(j.begin().key(), "artifact_version");
            EXPECT_EQ(j["config_hash"], hash);
            EXPECT_TRUE(j.contains("config"));
        } else if (a.extension() == ".ckpt") {
            EXPECT_EQ(body.substr(0, 8), "NLSBCKPT");
        }
    }
}

TEST(Runner, SameConfigAndSeedGiveIdenticalBytes)
{
    const auto d1 = scratch("det1"), d2 = scratch("det2");
    const std::string text = R"({"command": "simulate-sde", "dim": 4, "seed": 77, "sde": {"T": 0.1, "trajectories": 6}})";
    ConfigOverrides o1, o2;
    o1.output_dir = d1;
    o2.output_dir = d2;
    std::ostringstream log;
    const auto r1 = run(parse_config(text, o1), log);
    const auto r2 = run(parse_config(text, o2), log);
    ASSERT_EQ(r1.artifacts, r2.artifacts);
    for (const auto& a : r1.artifacts)
        EXPECT_EQ(slurp(d1 / a), slurp(d2 / a)) << a;
}

TEST(Runner, StationarySmokeProfile)
{
    const auto dir = scratch("smoke");
    const auto cfg = parse_config(R"({"command": "stationary-stats", "dim": 4, "output_dir": ")" + dir.string() +
                                  R"(", "sde": {"dt": 2e-3},
                                  "stationary": {"burn_in": 2, "horizon": 10, "trajectories": 100}})");
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run(cfg, log);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_EQ(res.exit_code, ExitSuccess) << res.message;
    EXPECT_LT(secs, 60.0);
    const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(rep["functionals"]["mass_rate"]["n"], 100);
    EXPECT_TRUE(rep["histograms"]["mass"].contains("edges"));
}

TEST(Cli, ExitCodes)
{
    const auto dir = scratch("cli");
    const auto good = write_config(dir, R"({"command": "verify-radial-sobolev", "radial_sobolev": {"samples": 20, "dim": 16}})");
    EXPECT_EQ(run_cli("verify-radial-sobolev --config " + good.string() + " --out " + (dir / "a").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "a" / "report.json"));

    EXPECT_EQ(run_cli("simulate-det --config " + good.string() + " --out " + (dir / "b").string()), 2);
    EXPECT_TRUE(fs::exists(dir / "b" / "error.json"));

    const auto invalid = write_config(dir, R"({"command": "simulate-det", "flow": {"dt": 0}})");
    EXPECT_EQ(run_cli("simulate-det --config " + invalid.string() + " --out " + (dir / "c").string()), 2);
    EXPECT_TRUE(fs::exists(dir / "c" / "error.json"));

    EXPECT_EQ(run_cli("simulate-det --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("no-such-command --config x"), 2);
    EXPECT_EQ(run_cli("simulate-det --config " + good.string() + " --workers 0"), 2);

    const auto budget = write_config(dir, R"({"command": "verify-counting", "counting": {"ladder": [4, 8], "lambda_ladder": [600]}})");
    EXPECT_EQ(run_cli("verify-counting --config " + budget.string() + " --out " + (dir / "d").string()), 4);
    EXPECT_EQ(nlohmann::json::parse(slurp(dir / "d" / "error.json"))["error"], "budget");

    const auto picard = write_config(dir, R"({"command": "simulate-det", "dim": 8,
        "flow": {"scheme": "picard", "dt": 1e-3, "T": 1.0, "initial": [[1, 3.0, 0.0]]}})");
    EXPECT_EQ(run_cli("simulate-det --config " + picard.string() + " --out " + (dir / "e").string()), 4);

    const auto diverge = write_config(dir, R"({"command": "simulate-det", "dim": 8,
        "flow": {"dt": 0.5, "T": 50.0, "initial": [[1, 1e100, 0.0]]}})");
    EXPECT_EQ(run_cli("simulate-det --config " + diverge.string() + " --out " + (dir / "f").string()), 3);
}

TEST(Cli, SeedOverrideAndDeterminism)
{
    const auto dir = scratch("cli_seed");
    const auto cfg = write_config(dir, R"({"command": "verify-radial-sobolev", "radial_sobolev": {"samples": 30, "dim": 16}})");
    ASSERT_EQ(run_cli("verify-radial-sobolev --config " + cfg.string() + " --seed 5 --out " + (dir / "x").string()), 0);
    ASSERT_EQ(run_cli("verify-radial-sobolev --config " + cfg.string() + " --seed 5 --out " + (dir / "y").string()), 0);
    ASSERT_EQ(run_cli("verify-radial-sobolev --config " + cfg.string() + " --seed 6 --out " + (dir / "z").string()), 0);
    EXPECT_EQ(slurp(dir / "x" / "radial_sobolev.csv"), slurp(dir / "y" / "radial_sobolev.csv"));
    EXPECT_NE(slurp(dir / "x" / "radial_sobolev.csv"), slurp(dir / "z" / "radial_sobolev.csv"));
}
