#include "doctest.h"

#include "json.hpp"
#include "oscmat/cli.hpp"

#include <sstream>

using nlohmann::json;
namespace cli = oscmat::cli;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string& s)
{
    std::vector<std::string> lines;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) {
        lines.push_back(line);
    }
    return lines;
}

} // namespace

TEST_CASE("spectrum: stable example")
{
    const Result r = run({"spectrum", "--alpha", "-1", "--beta", "-1", "--re-min", "-20", "--im-min", "-2",
                          "--im-max", "2", "--n", "128"});
    REQUIRE(r.code == cli::kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["spectral_bound"].get<double>() < 0.0);
    CHECK(j["verdict"] == "UES");
    CHECK(j["classification"]["ues"] == true);
    CHECK(j["discrete"].size() == 5);
}

TEST_CASE("spectrum: markovian example has root 0")
{
    const Result r =
        run({"spectrum", "--alpha", "0", "--beta", "0", "--k", "0", "--re-min", "-5", "--re-max", "2", "--n", "64"});
    REQUIRE(r.code == cli::kExitOk);
    const json j = json::parse(r.out);
    bool found = false;
    for (const json& z : j["roots"]) {
        found = found || std::hypot(z["re"].get<double>(), z["im"].get<double>()) < 1e-10;
    }
    CHECK(found);
}

TEST_CASE("invalid input exits with 2")
{
    CHECK(run({"spectrum", "--k", "-1"}).code == cli::kExitValidation);
    CHECK(run({"spectrum", "--re-min", "1", "--re-max", "0"}).code == cli::kExitValidation);
    CHECK(run({"evolve", "--scheme", "rk4"}).code == cli::kExitValidation);
    CHECK(run({"no-such-command"}).code == cli::kExitValidation);
    CHECK(run({"delay", "--a", "1,2;3"}).code == cli::kExitValidation);
    CHECK(run({"wave", "--k", "1"}).code == cli::kExitValidation);
    const Result r = run({"spectrum", "--k", "-1"});
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("numerical failure exits with 3")
{
    const Result r = run({"delay", "--a", "-1", "--psi", "0", "--re-min", "-1", "--r-sweep", "0.5:0.5:0.1"});
    CHECK(r.code == cli::kExitNumerical);
}

TEST_CASE("stability-map")
{
    const Result r = run({"stability-map", "--k", "0", "--alpha-min", "-1", "--alpha-max", "-1", "--beta-min", "-1",
                          "--beta-max", "-1", "--points", "1"});
    REQUIRE(r.code == cli::kExitOk);
    const std::vector<std::string> lines = split_lines(r.out);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "alpha,beta,closed_form_ues,spectral_bound,agree");
    CHECK(lines[1].rfind("-1,-1,1,", 0) == 0);
    CHECK(lines[1].back() == '1');

    const Result grid = run({"stability-map", "--k", "1", "--points", "5"});
    REQUIRE(grid.code == cli::kExitOk);
    CHECK(split_lines(grid.out).size() == 26);
}

TEST_CASE("delay: scalar example is delay independent")
{
    const Result r = run({"delay", "--a", "-1", "--psi", "0.5", "--r-sweep", "0.1:1.0:0.1"});
    REQUIRE(r.code == cli::kExitOk);
    const json j = json::parse(r.out);
    CHECK(j["independent"] == true);
    CHECK(j["rows"].size() == 10);
    for (const json& row : j["rows"]) {
        CHECK(row["root"].get<double>() < 0.0);
    }

    const Result sim =
        run({"delay", "--a", "-1", "--psi", "1.5", "--r-sweep", "0.5:0.5:0.1", "--simulate", "0.5", "--T", "10"});
    REQUIRE(sim.code == cli::kExitOk);
    CHECK(json::parse(sim.out).contains("simulation"));
}

TEST_CASE("evolve: markovian constant state")
{
    const Result r = run({"evolve", "--constant-ic", "--n", "16", "--T", "0.5", "--dt", "0.01"});
    REQUIRE(r.code == cli::kExitOk);
    const std::vector<std::string> lines = split_lines(r.out);
    REQUIRE(lines.size() == 52);
    CHECK(lines[0] == "time,norm,min_value,boundary0_re,boundary0_im,boundary1_re,boundary1_im");
    const double first = std::stod(lines[1].substr(lines[1].find(',') + 1));
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const double norm = std::stod(lines[i].substr(lines[i].find(',') + 1));
        CHECK(std::abs(norm - first) <= 1e-13);
    }
}

TEST_CASE("wave output")
{
    const Result r = run({"wave", "--alpha", "-1", "--beta", "-1", "--n", "32", "--T", "0.1", "--dt", "0.01"});
    REQUIRE(r.code == cli::kExitOk);
    const std::vector<std::string> lines = split_lines(r.out);
    CHECK(lines[0] == "time,energy,displacement_norm,boundary0,boundary1");
    CHECK(lines.size() == 12);
}

TEST_CASE("verify --quick passes and is deterministic")
{
    const Result a = run({"verify", "--quick"});
    const Result b = run({"verify", "--quick"});
    CHECK(a.code == cli::kExitOk);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("# verify seed=0xD7DB quick", 0) == 0);
    CHECK(a.out.find("FAIL") == std::string::npos);

    const Result c = run({"verify", "--quick", "--seed", "7"});
    CHECK(c.code == cli::kExitOk);

    for (const cli::CheckLine& line : cli::verify_checks(true, cli::kDefaultSeed)) {
        CHECK_MESSAGE(line.pass, line.name);
    }
}

TEST_CASE("outputs are reproducible")
{
    const std::vector<std::string> args{"spectrum", "--alpha", "0.4", "--beta", "-0.6", "--k", "1", "--n", "64"};
    CHECK(run(args).out == run(args).out);
}

TEST_CASE("parse_matrix")
{
    const auto m = cli::parse_matrix("1,2;3,4");
    REQUIRE(m.size() == 2);
    CHECK(m[0] == std::vector<double>{1.0, 2.0});
    CHECK(m[1] == std::vector<double>{3.0, 4.0});
    CHECK(cli::parse_matrix("-1") == std::vector<std::vector<double>>{{-1.0}});
    CHECK_THROWS(cli::parse_matrix("1,2;3"));
    CHECK_THROWS(cli::parse_matrix("a"));
    CHECK_THROWS(cli::parse_matrix(""));
}

TEST_CASE("parse_range")
{
    const auto r = cli::parse_range("0.1:1.0:0.1");
    REQUIRE(r.size() == 10);
    CHECK(r.front() == 0.1);
    CHECK(r[2] == 0.3);
    CHECK(r.back() == 1.0);
    CHECK(cli::parse_range("0.5:0.5:0.1") == std::vector<double>{0.5});
    CHECK_THROWS(cli::parse_range("1:0:0.1"));
    CHECK_THROWS(cli::parse_range("0:1:0"));
    CHECK_THROWS(cli::parse_range("0:1"));
}
