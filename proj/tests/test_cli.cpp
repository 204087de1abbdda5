#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "swreg/models.hpp"
#include "swreg/rng.hpp"

namespace {

using Vec = swreg::Vec;

std::string cli_path;

struct CmdResult {
    int status = -1;
    std::string out;
};

CmdResult run_cmd(const std::string& args) {
    CmdResult r;
    std::string cmd = cli_path + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, got);
    int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

swreg::json parse_out(const CmdResult& r) {
    REQUIRE(r.status == 0);
    return swreg::json::parse(r.out);
}

std::filesystem::path scratch_dir() {
    auto dir = std::filesystem::temp_directory_path() / "swreg_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string write_dataset(const std::string& name, std::uint64_t seed, std::size_t n) {
    swreg::Dataset d;
    swreg::rng::Counter g(seed);
    Vec w1 = (Vec(2) << 0.4, -0.1).finished();
    Vec w2 = (Vec(2) << -0.3, 0.2).finished();
    for (std::size_t i = 0; i < n; ++i) {
        Vec x = (Vec(2) << g.uniform(-1, 1), g.uniform(-1, 1)).finished();
        const Vec& w = (g.next_below(2) == 0) ? w1 : w2;
        d.ys.push_back(w.dot(x) + g.uniform(-0.02, 0.02));
        d.xs.push_back(std::move(x));
    }
    auto path = (scratch_dir() / name).string();
    swreg::save_csv(d, path);
    return path;
}

} // namespace

TEST_CASE("bound: switching-linear golden value") {
    auto j = parse_out(run_cmd("bound switching-linear --emp 0.1 --p 1 --C 2 --Rx 1 --Rw 1 "
                               "--n 400 --delta 0.1353352832366127"));
    CHECK(j.at("raw_total").get<double>() == doctest::Approx(0.35).epsilon(1e-9));
    CHECK(j.at("control_term").get<double>() == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(j.at("formula_id") == "switching-linear-ln");
}

TEST_CASE("capacity: rad-linear golden value and unknown id") {
    auto j = parse_out(run_cmd("capacity rad-linear --Rx 1 --Rw 1 --n 100"));
    CHECK(j.at("value").get<double>() == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(j.at("kind") == "rademacher");

    CmdResult bad = run_cmd("capacity no-such-formula");
    CHECK(bad.status == 2);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cmd("").status == 2);
    CHECK(run_cmd("fit --csv /nonexistent.csv --C 2").status == 2); // missing --seed
    CHECK(run_cmd("srm --csv /nonexistent.csv --Cmax 2").status == 2);
    CHECK(run_cmd("validate").status == 2);
    CHECK(run_cmd("capacity rad-mc --csv /tmp/x.csv").status == 2); // missing --seed
    CHECK(run_cmd("bound no-such-id").status == 2);
    CHECK(run_cmd("bound general --delta 2.0").status == 2);
}

TEST_CASE("runtime errors exit with 1") {
    CHECK(run_cmd("fit --csv /nonexistent/file.csv --C 2 --seed 1").status == 1);
}

TEST_CASE("fit then bound --emp-from-model round trip") {
    std::string csv = write_dataset("roundtrip.csv", 5, 60);
    auto model_path = (scratch_dir() / "model.json").string();
    auto j = parse_out(run_cmd("fit --model switching --csv " + csv +
                               " --C 2 --seed 7 --restarts 10 --out " + model_path + " && cat " +
                               model_path));
    double objective = j.at("objective").get<double>();

    // Extract the model object for the bound command.
    auto model_only = (scratch_dir() / "model_only.json").string();
    {
        std::ofstream out(model_only);
        out << j.at("model").dump();
    }
    auto b = parse_out(run_cmd("bound switching-linear --emp-from-model " + model_only +
                               " --csv " + csv + " --C 2 --n 60 --delta 0.05"));
    CHECK(b.at("empirical_risk").get<double>() == doctest::Approx(objective).epsilon(1e-10));
    CHECK(b.at("raw_total").get<double>() >=
          b.at("empirical_risk").get<double>() + b.at("confidence_term").get<double>() - 1e-12);
}

TEST_CASE("fit output is byte-identical across runs") {
    std::string csv = write_dataset("determinism.csv", 9, 40);
    std::string args = "fit --model switching --csv " + csv + " --C 2 --seed 3 --restarts 8";
    CmdResult a = run_cmd(args);
    CmdResult b = run_cmd(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("fit honors SWREG_WORKERS without changing the result") {
    std::string csv = write_dataset("workers.csv", 11, 40);
    std::string args = "fit --model switching --csv " + csv + " --C 2 --seed 4 --restarts 8";
    CmdResult a = run_cmd(args);
    setenv("SWREG_WORKERS", "4", 1);
    CmdResult b = run_cmd(args);
    unsetenv("SWREG_WORKERS");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("srm reports a table and a selection") {
    std::string csv = write_dataset("srm.csv", 13, 120);
    auto j = parse_out(run_cmd("srm --csv " + csv + " --Cmax 3 --seed 2 --restarts 5 --p 2"));
    CHECK(j.at("table").size() == 3);
    int cstar = j.at("C_star").get<int>();
    CHECK(cstar >= 1);
    CHECK(cstar <= 3);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : j.at("table")) best = std::min(best, row.at("bound").get<double>());
    for (const auto& row : j.at("table"))
        if (row.at("C").get<int>() == cstar)
            CHECK(row.at("bound").get<double>() == doctest::Approx(best));
}

TEST_CASE("validate emits a coverage report") {
    auto j = parse_out(run_cmd("validate --trials 4 --n 25 --test-n 400 --C 2 --d 1 "
                               "--noise 0.05 --restarts 2 --seed 21"));
    CHECK(j.at("trials").get<int>() == 4);
    double cov = j.at("coverage").get<double>();
    CHECK(cov >= 0.0);
    CHECK(cov <= 1.0);
}

TEST_CASE("rate emits the slope and a TSV series") {
    auto tsv = (scratch_dir() / "rate.tsv").string();
    auto j = parse_out(run_cmd("rate --formula switching-linear-chained --C 2 --d 2 "
                               "--n-min 1024 --n-max 1048576 --points 9 --tsv " + tsv));
    CHECK(j.at("slope").get<double>() == doctest::Approx(-0.5).epsilon(1e-6));

    std::ifstream in(tsv);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "n\tcontrol");
    int lines = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++lines;
    CHECK(lines == 9);
}

int main(int argc, char** argv) {
    doctest::Context ctx;
    std::vector<char*> doctest_args;
    for (int i = 0; i < argc; ++i) {
        if (i == 1 && argv[i][0] != '-') {
            cli_path = argv[i];
            continue;
        }
        doctest_args.push_back(argv[i]);
    }
    if (cli_path.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-swreg-binary> [doctest args]\n");
        return 1;
    }
    ctx.applyCommandLine(int(doctest_args.size()), doctest_args.data());
    return ctx.run();
}
