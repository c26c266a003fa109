#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Run cli(const std::string& args, const std::string& env = "") {
    const fs::path tmp = fs::temp_directory_path();
    const auto o = tmp / "ncbogo-cli.out";
    const auto e = tmp / "ncbogo-cli.err";
    const std::string cmd = env + " \"" NCBOGO_CLI_PATH "\" " + args + " >" + o.string() + " 2>" + e.string();
    const int raw = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / ("ncbogo-cli-" + name + ".ini");
    std::ofstream(p) << text;
    return p;
}

std::string config(const std::string& name) { return std::string(NCBOGO_CONFIG_DIR) + "/" + name + ".ini"; }

nlohmann::json summary_in(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

} // namespace

TEST_CASE("help and bad usage") {
    CHECK(cli("--help").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("validate prints the normalized configuration") {
    auto r = cli("validate " + config("uniform_spectrum"));
    CHECK(r.code == 0);
    CHECK(r.out.find("scenario = spectrum") != std::string::npos);
    CHECK(r.out.find("K = 62") != std::string::npos);
}

TEST_CASE("configuration errors exit with 2 and name the key") {
    auto p = write_config("bad", "scenario = spectrum\n[grid]\nn_points = 64\n");
    auto r = cli("run " + p.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("grid.length") != std::string::npos);
    CHECK(r.err.find("error[configuration]") != std::string::npos);
    CHECK(cli("run /nonexistent.ini").code == 2);
}

TEST_CASE("oversized Fock basis exits with 5") {
    auto p = write_config("big", "scenario = fock-oracle\n[grid]\nn_points = 64\nlength = 6.283185307179586\n"
                                 "[physics]\nu_tilde = 1\n[numerics]\nk_mode = 1\nfock_n_values = 700\n");
    auto r = cli("run " + p.string() + " -o cli-big");
    CHECK(r.code == 5);
    CHECK(r.err.find("error[resource]") != std::string::npos);
}

TEST_CASE("unreachable tolerance exits with 3") {
    auto p = write_config("tight", "scenario = stationary\n[grid]\nn_points = 128\nlength = 20\nboundary = box\n"
                                   "[physics]\nu_tilde = 10\npotential = harmonic\n[numerics]\ntol = 1e-17\n");
    CHECK(cli("run " + p.string() + " -o cli-tight").code == 3);
}

TEST_CASE("output directory precedence") {
    fs::remove_all("cli-env");
    fs::remove_all("cli-flag");
    auto r = cli("run " + config("fock_oracle"), "NCBOGO_OUTPUT_DIR=cli-env");
    CHECK(r.code == 0);
    CHECK(fs::exists("cli-env/summary.json"));
    r = cli("run " + config("fock_oracle") + " -o cli-flag", "NCBOGO_OUTPUT_DIR=cli-env2");
    CHECK(fs::exists("cli-flag/summary.json"));
    CHECK_FALSE(fs::exists("cli-env2"));
    CHECK(r.out.find("cli-flag") != std::string::npos);
}

TEST_CASE("uniform spectrum through the CLI") {
    auto r = cli("run " + config("uniform_spectrum") + " -o cli-uniform");
    REQUIRE(r.code == 0);
    auto j = summary_in("cli-uniform");
    CHECK(j["results"]["max_relative_deviation"].get<double>() < 1e-8);
    CHECK(fs::exists("cli-uniform/spectrum.csv"));
    CHECK(j["metadata"]["program"] == "ncbogo");
}

TEST_CASE("non-interacting stationary run") {
    auto p = write_config("free", "scenario = stationary\n[grid]\nn_points = 128\nlength = 20\nboundary = box\n"
                                  "[physics]\nu_tilde = 0\npotential = harmonic\n[numerics]\ntol = 1e-11\n");
    REQUIRE(cli("run " + p.string() + " -o cli-free").code == 0);
    CHECK(std::abs(summary_in("cli-free")["results"]["mu"].get<double>() - 0.5) < 1e-8);
}

TEST_CASE("repeated runs are byte-identical") {
    REQUIRE(cli("run " + config("trap_spectrum") + " -o cli-rep").code == 0);
    const auto summary = slurp("cli-rep/summary.json");
    const auto table = slurp("cli-rep/spectrum.csv");
    REQUIRE(cli("run " + config("trap_spectrum") + " -o cli-rep").code == 0);
    CHECK(slurp("cli-rep/summary.json") == summary);
    CHECK(slurp("cli-rep/spectrum.csv") == table);
}
