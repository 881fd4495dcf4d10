#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

std::string cli_bin() {
    const char* p = std::getenv("UDCP_CLI_BIN");
    REQUIRE_MESSAGE(p != nullptr, "UDCP_CLI_BIN must point at the udcp binary");
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = cli_bin() + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf;
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
    int status = pclose(p);
    return {WEXITSTATUS(status), out};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    f << content;
}

struct Fixture {
    Fixture() {
        write_file("/tmp/udcp_kl_a.codes", "# base pair, side A\n00\n01\n11\n");
        write_file("/tmp/udcp_kl_b.codes", "10\n01\n");
        write_file("/tmp/udcp_cube1.codes", "0\n1\n");
    }
};
Fixture fixture;

}  // namespace

TEST_CASE("verify: base pair accepted with the right rates") {
    RunResult r = run("verify --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["schema"] == 1);
    CHECK(j["udcp"] == true);
    CHECK(j["n"] == 2);
    CHECK(std::abs(j["alpha_plus_beta"].get<double>() - 1.2924812503605781) < 1e-9);
}

TEST_CASE("verify: collision reported with exit 2") {
    RunResult r = run("verify --a /tmp/udcp_cube1.codes --b /tmp/udcp_cube1.codes --json");
    CHECK(r.exit_code == 2);
    json j = json::parse(r.out);
    CHECK(j["udcp"] == false);
    REQUIRE(j.contains("collision"));
    CHECK(j["collision"]["sum"] == "1");
}

TEST_CASE("byte-identical reruns") {
    const std::string cmds[] = {
        "verify --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --json",
        "bound --method main --epsilon 0 --rho 0.654 --json",
        "prob --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --rho 0.4 --l 1 --mc 2000 --seed 7 --json",
        "search --n 3 --objective max-product --json",
        "sample --x 0110 --rho 0.5 --seed 11 --count 5 --json",
        "verify-ineq3 --mode float --grid-step 1e-4 --json",
    };
    for (const auto& c : cmds) {
        RunResult r1 = run(c);
        RunResult r2 = run(c);
        CHECK(r1.out == r2.out);
        CHECK(!r1.out.empty());
    }
}

TEST_CASE("bound subcommand values and schema") {
    RunResult r = run("bound --method main --epsilon 0 --rho 0.654 --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(std::abs(j["beta_bound"].get<double>() - 0.4228) < 5e-5);
    CHECK(j["method"] == "main");
    CHECK(j["terms"].contains("linear_const"));

    // optimized rho lands at the same constant
    RunResult opt = run("bound --method main --epsilon 0 --json");
    CHECK(std::abs(json::parse(opt.out)["beta_bound"].get<double>() - 0.4228) < 5e-5);

    RunResult w = run("bound --method warmup --epsilon 0 --rho 0.3838 --json");
    json jw = json::parse(w.out);
    CHECK(std::abs(jw["beta_bound"].get<double>() - 0.4777) < 5e-5);
    CHECK(std::abs(jw["terms"]["two_rho"].get<double>() - 0.7676) < 1e-12);

    RunResult c = run("bound --method classic --epsilon 0.25 --json");
    CHECK(json::parse(c.out)["beta_bound"] == 0.75);
}

TEST_CASE("census subcommand format") {
    RunResult r = run("census --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --json");
    json j = json::parse(r.out);
    CHECK(j["n"] == 2);
    CHECK(j["restriction"].is_null());
    CHECK(j["counts"] == json::array({1, 4, 1}));
    CHECK(j["total"] == 6);

    RunResult rl = run("census --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --l 2 --json");
    json jl = json::parse(rl.out);
    CHECK(jl["restriction"] == json::array({2}));
    CHECK(jl["counts"].size() == 2);
    CHECK(jl["total"] == 6);
}

TEST_CASE("prob subcommand carries both routes and mc block") {
    RunResult r = run(
        "prob --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --rho 0.3 --mc 10000 --seed 3 --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["exact_log2"].is_number());
    CHECK(j["direct_log2"].is_number());
    CHECK(j["mc"]["samples"] == 10000);
    REQUIRE(j["terms"]["per_distance_log2"].is_array());
    // the named per-distance terms recombine to the reported total
    double sum = 0;
    for (const auto& t : j["terms"]["per_distance_log2"])
        if (!t.is_null()) sum += std::exp2(t.get<double>());
    CHECK(std::abs(sum - j["exact_prob"].get<double>()) < 1e-12);
    double exact = j["exact_prob"].get<double>();
    double est = j["mc"]["estimate"].get<double>();
    double sigma = std::sqrt(exact * (1 - exact) / 10000.0);
    CHECK(std::abs(est - exact) < 5 * sigma);
}

TEST_CASE("split and dense subcommands") {
    RunResult r = run("split --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --mode exhaustive --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["floor_met"] == true);

    write_file("/tmp/udcp_dense_a.codes", "000\n001\n010\n011\n100\n101\n110\n111\n");
    RunResult d = run("dense --a /tmp/udcp_dense_a.codes --l 1,2 --epsilon 0 --out /tmp/udcp_dense_out.codes --json");
    CHECK(d.exit_code == 0);
    json jd = json::parse(d.out);
    CHECK(jd["subset_size"] == 8);
    CHECK(jd["subset_is_dense"] == true);
    std::ifstream f("/tmp/udcp_dense_out.codes");
    CHECK(f.good());
}

TEST_CASE("rsse-check bound and battery") {
    RunResult r = run("rsse-check --u-size 8 --f 0.5 --g 0.25 --rho 0 --json");
    json j = json::parse(r.out);
    CHECK(j["bound_log2"].get<double>() == doctest::Approx(-8 * 1.25));

    RunResult v = run("rsse-check --u-size 2 --validate exhaustive --json");
    CHECK(v.exit_code == 0);
    CHECK(json::parse(v.out)["violations"] == 0);
}

TEST_CASE("verify-ineq3 both modes") {
    RunResult f = run("verify-ineq3 --mode float --grid-step 1e-4 --json");
    CHECK(f.exit_code == 0);
    json jf = json::parse(f.out);
    CHECK(jf["max_residual"].get<double>() < 0);
    CHECK(jf["certified"] == false);

    RunResult i = run("verify-ineq3 --mode interval --out /tmp/udcp_cert.jsonl --json");
    CHECK(i.exit_code == 0);
    CHECK(json::parse(i.out)["certified"] == true);
    std::ifstream cert("/tmp/udcp_cert.jsonl");
    std::string header;
    REQUIRE(std::getline(cert, header));
    json jh = json::parse(header);
    CHECK(jh["certified"] == true);
    std::string line;
    int lines = 0;
    double prev_hi = jh["min_epsilon"].get<double>();
    while (std::getline(cert, line) && lines < 100000) {
        json js = json::parse(line);
        CHECK(js["upper_bound"].get<double>() < 0);
        CHECK(js["lo"].get<double>() == doctest::Approx(prev_hi));
        prev_hi = js["hi"].get<double>();
        ++lines;
    }
    CHECK(lines == jh["subintervals"].get<int>());
    CHECK(prev_hi == doctest::Approx(0.01));
}

TEST_CASE("search subcommand and budget exit code") {
    RunResult r = run("search --n 2 --objective max-product --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["best"]["product"] == 6);
    CHECK(j["optimal"] == true);

    RunResult b = run("search --n 5 --objective max-product --budget 2000 --json");
    CHECK(b.exit_code == 3);
    CHECK(json::parse(b.out)["optimal"] == false);
}

TEST_CASE("sample subcommand determinism and env seed") {
    RunResult r1 = run("sample --x 0110 --rho 1 --count 3 --json");
    json j = json::parse(r1.out);
    REQUIRE(j["samples"].size() == 3);
    for (const auto& s : j["samples"]) CHECK(s == "0110");  // rho = 1 copies

    std::string with_env = "UDCP_SEED=123 " + cli_bin() + " sample --x 01 --rho 0 --count 4 --json 2>/dev/null";
    std::string with_flag = cli_bin() + " sample --x 01 --rho 0 --count 4 --seed 123 --json 2>/dev/null";
    std::array<char, 4096> buf;
    std::string o1, o2;
    FILE* p1 = popen(with_env.c_str(), "r");
    while (fgets(buf.data(), buf.size(), p1)) o1 += buf.data();
    pclose(p1);
    FILE* p2 = popen(with_flag.c_str(), "r");
    while (fgets(buf.data(), buf.size(), p2)) o2 += buf.data();
    pclose(p2);
    CHECK(o1 == o2);
}

TEST_CASE("bad inputs: exit 1 and no stdout JSON") {
    RunResult r = run("census --a /nonexistent.codes --b /tmp/udcp_kl_b.codes --json");
    CHECK(r.exit_code == 1);
    CHECK(r.out.empty());

    RunResult u = run("frobnicate");
    CHECK(u.exit_code != 0);

    write_file("/tmp/udcp_bad.codes", "01\n0x1\n");
    RunResult b = run("verify --a /tmp/udcp_bad.codes --b /tmp/udcp_kl_b.codes --json");
    CHECK(b.exit_code == 1);
    CHECK(b.out.empty());

    RunResult flag = run("verify --a /tmp/udcp_kl_a.codes --b /tmp/udcp_kl_b.codes --frob");
    CHECK(flag.exit_code != 0);
}

TEST_CASE("human mode is an indented rendering of the same JSON") {
    RunResult pretty = run("bound --method classic --epsilon 0.1");
    RunResult compact = run("bound --method classic --epsilon 0.1 --json");
    CHECK(json::parse(pretty.out) == json::parse(compact.out));
    CHECK(pretty.out.find('\n') != std::string::npos);
}
