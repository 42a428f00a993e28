// Acceptance suite: runs every reproduction scenario from scenarios/ and
// prints one pass/fail line per criterion, plus an end-to-end exercise of the
// CLI pipeline. Exit code 0 when everything passes, 2 otherwise.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "modspace/json_io.hpp"
#include "modspace/scenarios.hpp"

namespace fs = std::filesystem;
using namespace modspace;

namespace {

bool run_cli_pipeline() {
    const std::string cli = MODSPACE_CLI_PATH;
    fs::path dir = fs::temp_directory_path() / "modspace_accept";
    fs::create_directories(dir);
    auto in_dir = [&](const std::string& f) { return (dir / f).string(); };

    auto run = [&](const std::string& args) {
        std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };

    if (run("gen grid --n 6 --out " + in_dir("space.json")) != 0) return false;
    if (run("family --space " + in_dir("space.json") + " --strategy monotone --axis 1 --out " +
            in_dir("family.json")) != 0)
        return false;
    if (run("modulus --space " + in_dir("space.json") + " --family " + in_dir("family.json") +
            " --p 2 --tol 1e-8 --out " + in_dir("cert.json")) != 0)
        return false;
    if (run("duality-check --space " + in_dir("space.json") + " --family " + in_dir("family.json") +
            " --tol 1e-6 " + in_dir("cert.json")) != 0)
        return false;

    // determinism: regenerating the space yields a byte-identical file
    if (run("gen grid --n 6 --out " + in_dir("space2.json")) != 0) return false;
    json a = load_json_file(in_dir("space.json"));
    json b = load_json_file(in_dir("space2.json"));
    if (a.dump() != b.dump()) return false;

    // exit code 2 on a failed check: corrupt the certificate's value
    json cert = load_json_file(in_dir("cert.json"));
    cert["value"] = cert["value"].get<double>() * 2.0;
    save_json_file(in_dir("bad_cert.json"), cert);
    int rc = run("duality-check --space " + in_dir("space.json") + " --family " +
                 in_dir("family.json") + " --tol 1e-6 " + in_dir("bad_cert.json"));
    return WEXITSTATUS(rc) == 2;
}

}  // namespace

int main() {
    std::vector<fs::path> configs;
    for (const auto& entry : fs::directory_iterator(MODSPACE_SCENARIO_DIR))
        if (entry.path().extension() == ".json") configs.push_back(entry.path());
    std::sort(configs.begin(), configs.end());

    int criterion = 0;
    bool all_pass = true;
    for (const auto& path : configs) {
        ++criterion;
        try {
            ScenarioResult result = run_scenario(load_json_file(path.string()));
            all_pass = all_pass && result.pass;
            std::printf("[%s] criterion %d (%s): %s\n", result.pass ? "PASS" : "FAIL", criterion,
                        result.name.c_str(), result.detail.c_str());
        } catch (const std::exception& ex) {
            all_pass = false;
            std::printf("[FAIL] criterion %d (%s): exception: %s\n", criterion,
                        path.filename().string().c_str(), ex.what());
        }
        std::fflush(stdout);
    }

    bool cli_ok = run_cli_pipeline();
    all_pass = all_pass && cli_ok;
    std::printf("[%s] cli pipeline: gen -> family -> modulus -> duality-check%s\n",
                cli_ok ? "PASS" : "FAIL", cli_ok ? "" : " (see stderr)");

    return all_pass ? 0 : 2;
}
