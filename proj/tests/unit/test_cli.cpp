#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

Result cli(const std::string& args) {
    const std::string cmd = std::string(XLAYER_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("xlayer_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("gain subcommand") {
    const auto r = cli("gain 30 32 55 128");
    CHECK(r.code == 0);
    CHECK(r.out == "2.181818\n");
}

TEST_CASE("exit codes") {
    CHECK(cli("run --nodes 8 --seed 1 --out " + scratch("ok").string()).code == 0);
    CHECK(cli("run --nodes 8 --seed 3 --out " + scratch("infeasible").string()).code == 3);
    CHECK(cli("run --nodes 1 --out " + scratch("bad").string()).code == 2);
    CHECK(cli("run --receiver rake").code == 2);
    CHECK(cli("run --config /nonexistent/scenario.json").code == 2);
    CHECK(cli("frobnicate").code == 2);
    CHECK(cli("emit-plots --out " + scratch("nothing").string()).code == 2);

    const auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"n_nodes": 8, "bogus_key": 1})";
    const auto r = cli("run --config " + cfg.string() + " --out " + scratch("cfg_out").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("bogus_key") != std::string::npos);
}

TEST_CASE("config file, flag overrides and manifest replay") {
    const auto cfg = scratch("scenario.json");
    std::ofstream(cfg) << R"({"n_nodes": 30, "master_seed": 9})";
    const auto a = scratch("replay_a"), b = scratch("replay_b");
    REQUIRE(cli("multistart --config " + cfg.string() + " --nodes 8 --seed 1 --trials 4 --out " + a.string()).code == 0);
    const std::string manifest = slurp(a / "manifest.json");
    CHECK(manifest.find("\"n_nodes\": 8") != std::string::npos);
    CHECK(manifest.find("\"master_seed\": 1") != std::string::npos);

    REQUIRE(cli("multistart --config " + (a / "manifest.json").string() + " --out " + b.string()).code == 0);
    for (const auto& e : fs::directory_iterator(a))
        CHECK_MESSAGE(slurp(e.path()) == slurp(b / e.path().filename()), e.path().filename().string());

    // a manifest from another experiment is rejected
    CHECK(cli("run --config " + (a / "manifest.json").string() + " --out " + scratch("replay_c").string()).code == 2);
}

TEST_CASE("emit-plots lists what it wrote") {
    const auto dir = scratch("plots");
    REQUIRE(cli("capacity --max-nodes 6 --trials 4 --out " + dir.string()).code == 0);
    const auto r = cli("emit-plots --out " + dir.string());
    CHECK(r.code == 0);
    CHECK(r.out.find("plot_capacity.csv") != std::string::npos);
    CHECK(fs::exists(dir / "plot_capacity.csv"));
}
