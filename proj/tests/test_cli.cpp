#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "config.hpp"
#include "scenarios.hpp"
#include "vqht/bosonic.hpp"
#include "vqht/errors.hpp"
#include "vqht/matrix_io.hpp"

using namespace vqht;
using namespace vqht::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("vqht_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_text(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(VQHT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("config schema")
{
    const auto s = parse_settings("[run]\nscenario = illuminate\n[illuminate]\nnb_grid = 1, 2\n");
    CHECK(s.scenario() == "illuminate");
    CHECK(s.reals("illuminate.nb_grid") == std::vector<double>{1.0, 2.0});
    CHECK(s.real("illuminate.n_s") == 0.1);
    CHECK(s.text("optimizer.kind") == "gradient");
    CHECK(s.flag("illuminate.save_probes"));
    CHECK(s.integer("run.seed") == 1);

    CHECK_THROWS_AS(parse_settings("[run]\nscenario = illuminate\ncolour = red\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = teleport\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nseed = 3\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = illuminate\n[illuminate]\neta = 2\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = illuminate\n[illuminate]\ncutoff = 20.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = illuminate\n[illuminate]\nnb_grid = 1,,2\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = illuminate\n[multi]\nlayers = 5\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = multi\n[multi]\nlayers = 5\nlayers = 7\n"), ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = discriminate\n[discriminate]\nchannel0 = identity\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = discriminate\n[discriminate]\nchannel0 = identity\n"
                                   "channel1 = phase_flip 1.2\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = discriminate\n[discriminate]\nchannel0 = identity\n"
                                   "channel1 = pauli 0.5 0.5 0.5 0\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = generalize-sweep\n[generalize-sweep]\n"
                                   "probe_file = /nonexistent/probe.txt\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_settings("[run]\nscenario = oracle\n[oracle]\nquery = fidelity\n"), ValidationError);
}

TEST_CASE("oracle queries")
{
    const auto flip = oracle_query(parse_settings("[run]\nscenario = oracle\n[oracle]\nquery = diamond-phase-flip\n"
                                                  "p = 0.3\n"));
    REQUIRE(flip.size() == 1);
    CHECK(flip[0].second == Catch::Approx(0.6).margin(1e-15));

    const auto dir = scratch("oracle");
    StoredMatrix a{"ket", {2}, Vec::Zero(2)}, b{"ket", {2}, Vec::Zero(2)};
    a.data(0, 0) = 1.0;
    b.data(0, 0) = b.data(1, 0) = 1.0 / std::sqrt(2.0);
    write_matrix((dir / "a.txt").string(), a);
    write_matrix((dir / "b.txt").string(), b);
    const std::string files = "state0 = " + (dir / "a.txt").string() + "\nstate1 = " + (dir / "b.txt").string() + "\n";
    const auto td = oracle_query(parse_settings("[run]\nscenario = oracle\n[oracle]\nquery = trace-distance\n" + files));
    CHECK(td[0].second == Catch::Approx(std::sqrt(0.5)).margin(1e-12));
    const auto fid = oracle_query(parse_settings("[run]\nscenario = oracle\n[oracle]\nquery = fidelity\n" + files));
    CHECK(fid[0].second == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("generalize sweep: TMSV as probe gives unit ratios")
{
    const auto dir = scratch("generalize");
    const int cutoff = 12;
    const auto ref = tmsv_state(0.1, cutoff);
    write_matrix((dir / "tmsv.txt").string(), {"density", ref.cutoffs(), ref.normalized()});
    // The ket form differs from the density in the last bits only.
    Eigen::SelfAdjointEigenSolver<Mat> es(ref.normalized());
    write_matrix((dir / "tmsv_ket.txt").string(), {"ket", ref.cutoffs(), es.eigenvectors().col(cutoff * cutoff - 1)});

    for (const char* file : {"tmsv.txt", "tmsv_ket.txt"}) {
        const bool exact = std::string(file) == "tmsv.txt";
        const auto s = parse_settings("[run]\nscenario = generalize-sweep\noutput_dir = " + dir.string() +
                                      "\n[generalize-sweep]\nprobe_file = " + (dir / file).string() +
                                      "\nnb_grid = 0.5,1\neta_grid = 0,1e-3,0.05\n");
        run_scenario(s, dir);
        const auto rows = read_csv(dir / "generalize.csv");
        REQUIRE(rows.size() == 7);
        CHECK(rows[0] == std::vector<std::string>{"N_B", "eta", "trace_ratio_to_tmsv", "chernoff_ratio_to_tmsv"});
        for (std::size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::abs(std::stod(rows[i][2]) - 1.0) <= 1e-9);
            // ln Q is about -5e-8 at eta = 1e-3; eigensolver noise on the
            // near-null idler tail limits it to ~1e-8 relative when the two
            // inputs differ in their last bits.
            CHECK(std::abs(std::stod(rows[i][3]) - 1.0) <= (exact ? 1e-12 : 1e-7));
        }
        // eta = 0 rows are the 0/0 convention.
        CHECK(rows[1][2] == "1");
        CHECK(rows[4][3] == "1");
    }
}

TEST_CASE("command line: exit codes, manifest and reproducible CSV")
{
    const auto dir = scratch("run");
    write_text(dir / "bad.ini", "[run]\nscenario = oracle\nunknown_key = 1\n[oracle]\nquery = diamond-phase-flip\n");
    CHECK(run_cli("validate " + (dir / "bad.ini").string()) == 2);
    CHECK(run_cli("run " + (dir / "bad.ini").string()) == 2);
    CHECK_FALSE(fs::exists("vqht-out/manifest.json"));
    CHECK(run_cli("run " + (dir / "missing.ini").string()) == 2);
    CHECK(run_cli("oracle diamond-phase-flip --p 0.25") == 0);
    CHECK(run_cli("oracle trace-distance") == 2);

    const std::string body = "[optimizer]\nkind = gradient\nrestarts = 2\n[discriminate]\nchannel0 = identity\n"
                             "channel1 = phase_flip 0.4\nreference_qubits = 1\nprobe_layers = 1\nmeasure_layers = 2\n";
    for (const char* name : {"a", "b"}) {
        write_text(dir / (std::string(name) + ".ini"), "[run]\nscenario = discriminate\nseed = 4\noutput_dir = " +
                                                           (dir / name).string() + "\n" + body);
        CHECK(run_cli("run " + (dir / (std::string(name) + ".ini")).string()) == 0);
    }
    CHECK(read_text(dir / "a" / "discriminate.csv") == read_text(dir / "b" / "discriminate.csv"));
    CHECK(read_text(dir / "a" / "cost_trace.csv") == read_text(dir / "b" / "cost_trace.csv"));
    const auto rows = read_csv(dir / "a" / "discriminate.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][1]) == Catch::Approx(0.8).epsilon(0.05));
    const auto manifest = read_text(dir / "a" / "manifest.json");
    CHECK(manifest.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(manifest.find("\"wall_time_s\"") != std::string::npos);

    // Two iterations cannot converge: exit 3, results still written.
    write_text(dir / "slow.ini", "[run]\nscenario = discriminate\noutput_dir = " + (dir / "slow").string() +
                                     "\n[optimizer]\nkind = gradient\nrestarts = 1\nmax_iters = 2\n"
                                     "[discriminate]\nchannel0 = identity\nchannel1 = phase_flip 0.4\n");
    CHECK(run_cli("run " + (dir / "slow.ini").string()) == 3);
    CHECK(fs::exists(dir / "slow" / "discriminate.csv"));
    CHECK(read_text(dir / "slow" / "manifest.json").find("not-converged") != std::string::npos);
}
