// Command-line front end. Talks to the library only through the C API.
#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "ncbogo/ncbogo.h"

namespace {

int report(ncbogo_status s) {
    std::fprintf(stderr, "ncbogo: error[%s]: %s\n", ncbogo_status_name(s), ncbogo_last_error());
    return ncbogo_status_exit_code(s);
}

int cmd_validate(const std::string& path) {
    ncbogo_config* cfg = nullptr;
    ncbogo_status s = ncbogo_config_load(path.c_str(), &cfg);
    if (s != NCBOGO_OK) return report(s);
    char* text = nullptr;
    s = ncbogo_config_normalized(cfg, &text);
    ncbogo_config_free(cfg);
    if (s != NCBOGO_OK) return report(s);
    std::fputs(text, stdout);
    ncbogo_string_free(text);
    return 0;
}

int cmd_run(const std::string& path, const std::string& out_flag) {
    ncbogo_config* cfg = nullptr;
    ncbogo_status s = ncbogo_config_load(path.c_str(), &cfg);
    if (s != NCBOGO_OK) return report(s);
    std::string dir = out_flag;
    if (dir.empty())
        if (const char* env = std::getenv("NCBOGO_OUTPUT_DIR"); env && *env) dir = env;
    ncbogo_result* res = nullptr;
    s = ncbogo_run(cfg, dir.empty() ? nullptr : dir.c_str(), &res);
    ncbogo_config_free(cfg);
    int code = 0;
    if (s != NCBOGO_OK) code = report(s);
    if (res) {
        char* out_dir = nullptr;
        if (ncbogo_result_output_dir(res, &out_dir) == NCBOGO_OK) {
            std::printf("%s\n", out_dir);
            ncbogo_string_free(out_dir);
        }
        ncbogo_result_free(res);
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Number-conserving Bogoliubov calculations for 1D Bose gases"};
    app.set_version_flag("--version", std::string(ncbogo_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    auto* run = app.add_subcommand("run", "Execute the scenario described by a config file");
    run->add_option("config", config_path, "Scenario config (INI)")->required();
    run->add_option("-o,--output", out_dir, "Output directory (overrides NCBOGO_OUTPUT_DIR and the config)");

    auto* validate = app.add_subcommand("validate", "Check a config file and print it with defaults resolved");
    validate->add_option("config", config_path, "Scenario config (INI)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*run) return cmd_run(config_path, out_dir);
    return cmd_validate(config_path);
}
