#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks against the installed binary; the path arrives as the
// first test argument (see tests/CMakeLists.txt).

namespace {

std::string g_cli_path;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

double parse_field(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + " = ");
    REQUIRE(pos != std::string::npos);
    return std::strtod(text.c_str() + pos + key.size() + 3, nullptr);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("pressure subcommand prints the free-gas value") {
    const RunResult r = run_cli("pressure --beta 1 --mu -1 --lambda 0");
    REQUIRE(r.exit_code == 0);
    REQUIRE(parse_field(r.output, "pressure") == Catch::Approx(0.145413).margin(1e-5));
    REQUIRE(parse_field(r.output, "r_star") == 0.0);
}

TEST_CASE("divergent free gas exits with the domain code") {
    const RunResult r = run_cli("pressure --beta 1 --mu 2 --lambda 0");
    REQUIRE(r.exit_code == 3);
    REQUIRE(r.output.find("domain error") != std::string::npos);
}

TEST_CASE("usage errors exit with code 1") {
    REQUIRE(run_cli("pressure --beta 1").exit_code == 1);
    REQUIRE(run_cli("no-such-command").exit_code == 1);
    REQUIRE(run_cli("pressure --beta 1 --mu 0 --lambda 1 --cutoff banana").exit_code == 1);
}

TEST_CASE("sweep produces identical bytes for different worker counts") {
    namespace fs = std::filesystem;
    const fs::path out1 = fs::temp_directory_path() / "bhmf_cli_t1.csv";
    const fs::path out2 = fs::temp_directory_path() / "bhmf_cli_t4.csv";
    const std::string axes = "--axis mu:-1.5:-0.5:3 --beta 1 --lambda 0 ";
    REQUIRE(run_cli("sweep " + axes + "--threads 1 --out " + out1.string()).exit_code == 0);
    REQUIRE(run_cli("sweep " + axes + "--threads 4 --out " + out2.string()).exit_code == 0);
    const std::string a = slurp(out1), b = slurp(out2);
    REQUIRE_FALSE(a.empty());
    REQUIRE(a == b);
    REQUIRE(a.rfind("beta,mu,lambda,", 0) == 0);
    fs::remove(out1);
    fs::remove(out2);
}

TEST_CASE("sweep with a parameter neither fixed nor on an axis is rejected") {
    const RunResult r = run_cli("sweep --axis mu:-1:-0.5:2 --beta 1 --out /tmp/bhmf_nope.csv");
    REQUIRE(r.exit_code == 3);
}

TEST_CASE("entropy-check reports a tiny residual") {
    const RunResult r = run_cli("entropy-check --beta 1 --mu 0.5 --lambda 1 --nu 0.7");
    REQUIRE(r.exit_code == 0);
    REQUIRE(parse_field(r.output, "entropy_identity_residual") < 1e-9);
}

TEST_CASE("oracle-compare prints per-V deviations") {
    const RunResult r = run_cli("oracle-compare --beta 1 --mu 0 --lambda 1 --site-cutoff 1 --v-list 2,3");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("V = 2") != std::string::npos);
    REQUIRE(r.output.find("V = 3") != std::string::npos);
}

TEST_CASE("rate subcommand emits a table") {
    const RunResult r = run_cli("rate --beta 1 --mu 0.5 --lambda 1 --x-max 0.4 --x-count 3");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.rfind("x,rate,r_argmax\n", 0) == 0);
    REQUIRE(std::count(r.output.begin(), r.output.end(), '\n') == 4);
}

int main(int argc, char** argv) {
    if (argc > 1 && argv[1][0] != '-') {
        g_cli_path = argv[1];
        --argc;
        ++argv;
    } else if (const char* env = std::getenv("BHMF_CLI")) {
        g_cli_path = env;
    } else {
        std::fprintf(stderr, "test_cli: pass the CLI path as the first argument\n");
        return 2;
    }
    return Catch::Session().run(argc, argv);
}
