// vqht command-line front end: run | validate | oracle.
//
// Exit codes: 0 success, 2 validation error, 3 optimizer did not converge
// (results still written), 1 any other failure.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "scenarios.hpp"
#include "vqht/errors.hpp"
#include "vqht/parallel.hpp"

namespace fs = std::filesystem;
using namespace vqht;
using namespace vqht::cli;

namespace {

constexpr int kOk = 0, kFailure = 1, kInvalid = 2, kNotConverged = 3;

std::string utc_now()
{
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// run.threads, capped by VQHT_THREADS when that is set.
int effective_threads(const Settings& s)
{
    const int requested = static_cast<int>(s.integer("run.threads"));
    int n = worker_count(requested);
    if (const char* env = std::getenv("VQHT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) n = std::min(n, cap);
    }
    return n;
}

nlohmann::ordered_json config_echo(const Settings& s)
{
    auto j = nlohmann::ordered_json::object();
    for (const auto& [key, value] : s.values()) {
        const auto dot = key.find('.');
        j[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    return j;
}

int run(const std::string& config_path)
{
    Settings s;
    try {
        s = load_settings(config_path);
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalid;
    }
    s.set("run.threads", std::to_string(effective_threads(s)));
    const fs::path dir = s.text("run.output_dir");
    try {
        fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "cannot create output directory: " << e.what() << "\n";
        return kInvalid;
    }

    nlohmann::ordered_json manifest;
    manifest["artifact"] = "vqht";
    manifest["version"] = VQHT_VERSION;
    manifest["scenario"] = s.scenario();
    manifest["seed"] = s.integer("run.seed");
    manifest["threads"] = s.integer("run.threads");
    manifest["config"] = config_echo(s);
    manifest["started_at"] = utc_now();

    const auto t0 = std::chrono::steady_clock::now();
    int code = kOk;
    ScenarioOutput out;
    try {
        out = run_scenario(s, dir);
        code = out.converged ? kOk : kNotConverged;
        manifest["status"] = out.converged ? "ok" : "not-converged";
    } catch (const ValidationError& e) {
        code = kInvalid;
        manifest["status"] = "invalid";
        manifest["error"] = e.what();
    } catch (const std::exception& e) {
        code = kFailure;
        manifest["status"] = "error";
        manifest["error"] = e.what();
    }
    manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["exit_code"] = code;
    manifest["summary"] = out.summary;
    manifest["warnings"] = out.warnings;
    manifest["files"] = out.files;

    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
    if (manifest.contains("error")) std::cerr << "error: " << manifest["error"].get<std::string>() << "\n";
    std::cout << s.scenario() << ": " << manifest["status"].get<std::string>() << ", results in " << dir.string()
              << "\n";
    return code;
}

int validate(const std::string& config_path)
{
    try {
        const auto s = load_settings(config_path);
        std::cout << config_path << ": valid " << s.scenario() << " config\n";
        return kOk;
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalid;
    }
}

struct OracleArgs {
    std::string query;
    std::optional<std::string> state0, state1, unitary;
    std::optional<double> p, n_s;
    std::optional<int> cutoff;
};

int oracle(const OracleArgs& a)
{
    // Goes through the same schema as a config file.
    std::string ini = "[run]\nscenario = oracle\n[oracle]\nquery = " + a.query + "\n";
    if (a.state0) ini += "state0 = " + *a.state0 + "\n";
    if (a.state1) ini += "state1 = " + *a.state1 + "\n";
    if (a.unitary) ini += "unitary = " + *a.unitary + "\n";
    char buf[64];
    if (a.p) ini += (std::snprintf(buf, sizeof buf, "p = %.17g\n", *a.p), buf);
    if (a.n_s) ini += (std::snprintf(buf, sizeof buf, "n_s = %.17g\n", *a.n_s), buf);
    if (a.cutoff) ini += "cutoff = " + std::to_string(*a.cutoff) + "\n";
    try {
        for (const auto& [name, value] : oracle_query(parse_settings(ini))) {
            std::printf("%s,%.12g\n", name.c_str(), value);
        }
        return kOk;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalid;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Variational quantum hypothesis testing experiments"};
    app.require_subcommand(1);

    std::string run_path;
    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    run_cmd->add_option("config", run_path, "INI config")->required();

    std::string validate_path;
    bool show_schema = false;
    auto* validate_cmd = app.add_subcommand("validate", "Check a config file without computing anything");
    validate_cmd->add_option("config", validate_path, "INI config");
    validate_cmd->add_flag("--schema", show_schema, "Print every section and key with its default");

    OracleArgs oa;
    auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate one analytic oracle and print name,value lines");
    oracle_cmd->add_option("query", oa.query, "trace-distance | helstrom | fidelity | chernoff | diamond-unitary | "
                                              "diamond-phase-flip | tmsv-reference")
        ->required();
    oracle_cmd->add_option("--state0", oa.state0, "Matrix file");
    oracle_cmd->add_option("--state1", oa.state1, "Matrix file");
    oracle_cmd->add_option("--unitary", oa.unitary, "Matrix file");
    oracle_cmd->add_option("--p", oa.p, "Phase-flip probability");
    oracle_cmd->add_option("--n-s", oa.n_s, "TMSV signal photons");
    oracle_cmd->add_option("--cutoff", oa.cutoff, "Fock cutoff per mode");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (*run_cmd) return run(run_path);
        if (*validate_cmd) {
            if (show_schema) {
                std::cout << schema_text();
                return kOk;
            }
            if (validate_path.empty()) {
                std::cerr << "validate: config path required\n";
                return kInvalid;
            }
            return validate(validate_path);
        }
        if (*oracle_cmd) return oracle(oa);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
