#include <doctest.h>

#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "laminar/models.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(LAMINAR_VC) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;)
        r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("laminar-cli-" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("check-directed") {
    TempDir dir;
    CHECK(run("gen-model --leaves 12 --seed 4 --out " + dir / "u.model.json").code == 0);
    CHECK(run("check-directed --model " + dir / "u.model.json").code == 0);

    std::ofstream(dir / "x.model.json") << R"({"kind":"family","universe":3,"sets":[[0],[0,1],[1,2]]})";
    const auto bad = run("check-directed --model " + dir / "x.model.json");
    CHECK(bad.code == 1);
    const auto j = nlohmann::json::parse(bad.out);
    CHECK(j["directed"] == false);
    CHECK(j["witness"] == nlohmann::json::array({1, 2}));

    CHECK(run("check-directed --model " + dir / "missing.model.json").code == 2);
    std::ofstream(dir / "broken.model.json") << R"({"kind":"ultrametric","parent":[-1,2,1]})";
    CHECK(run("check-directed --model " + dir / "broken.model.json").code == 2);
    CHECK(run("check-directed").code == 2);
}

TEST_CASE("gen-model round trip") {
    TempDir dir;
    REQUIRE(run("gen-model --kind ultrametric --leaves 8 --branching 2 --seed 7 --out " + dir / "a.model.json").code ==
            0);
    const auto loaded = laminar::load_model(dir / "a.model.json");
    CHECK(loaded == laminar::ModelFile{laminar::random_ultrametric(8, 2, 7), 7});
    REQUIRE(run("gen-model --kind order --size 5 --out " + dir / "o.model.json").code == 0);
    CHECK(std::get<laminar::OrderModel>(laminar::load_model(dir / "o.model.json").model).size == 5);
    CHECK(run("gen-model --kind nothing").code == 2);
}

TEST_CASE("verify-lemmas") {
    CHECK(run("verify-lemmas --trials 0").code == 2);
    const auto r = run("verify-lemmas --trials 20 --seed 3 --json");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["lemmas"].size() == 8);
    for (const auto& l : j["lemmas"]) {
        CHECK(l["trials"] == 20);
        CHECK(l["failures"] == 0);
        CHECK(l.contains("id"));
    }
}

TEST_CASE("growth csv") {
    TempDir dir;
    const std::string args = "growth --sizes 8,16,32 --trials 3 --seed 5 --no-timing";
    const auto a = run(args + " --out " + dir / "a.csv");
    const auto b = run(args + " --out " + dir / "b.csv");
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    const auto csv = slurp(dir / "a.csv");
    CHECK(csv == slurp(dir / "b.csv"));
    CHECK(csv.rfind("model,formula,arity,m,trial,seed,type_count,ms\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 3);

    const auto stdout_csv = run(args);
    CHECK(stdout_csv.out == csv);

    const auto json = run(args + " --json --out " + dir / "c.csv");
    const auto j = nlohmann::json::parse(json.out);
    CHECK(j["trials"].size() == 3);
    CHECK(j["ceiling"].get<double>() == doctest::Approx(1.15));

    CHECK(run("growth --sizes 16,8,32").code == 2);
    CHECK(run("growth --trials 0").code == 2);
    CHECK(run("growth --arity 3").code == 2);
    CHECK(run("growth --formula single-ball --arity 2").code == 2);
}

TEST_CASE("growth resource cap") {
    TempDir dir;
    const auto r = run("growth --formula lca-ball --arity 2 --sizes 8,16,32 --trials 1 --cap 30000 --out " +
                       dir / "p.csv");
    CHECK(r.code == 3);
    const auto csv = slurp(dir / "p.csv");
    CHECK(csv.rfind("model,formula,arity,m,trial,seed,type_count,ms\n", 0) == 0);
    // The m = 8 row fits under the cap, m = 16 does not.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("fullvcmin-demo") {
    CHECK(run("fullvcmin-demo --b-size 3").code == 2);
    const auto r = run("fullvcmin-demo --b-size 8 --json");
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["aggregate_bound"] == 2 * 64 * 2 + 8 * 2 + 1);
    CHECK(j["union_size"].get<std::size_t>() <= j["aggregate_bound"].get<std::size_t>());
    CHECK(j["pass"] == true);
}
