#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "vqht/errors.hpp"

namespace vqht::cli {

namespace {

enum class Kind { Int, Real, IntList, RealList, Choice, Text, Flag, Channel, File };

struct KeySpec {
    std::string name;
    Kind kind;
    std::string fallback;  ///< empty: required
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    std::vector<std::string> choices = {};
    std::string help = {};
};

using Section = std::vector<KeySpec>;

const std::string kRequired;

const std::vector<std::string> kScenarios{"discriminate", "diamond-estimate", "illuminate", "noise-sweep",
                                          "multi",        "generalize-sweep", "oracle"};

const std::map<std::string, Section>& schema()
{
    static const std::map<std::string, Section> s{
        {"run",
         {{"scenario", Kind::Choice, kRequired, 0, 0, kScenarios, "experiment to run"},
          {"seed", Kind::Int, "1", 0, 1e15, {}, "master seed"},
          {"output_dir", Kind::Text, "vqht-out", 0, 0, {}, "CSV, manifest and probe files go here"},
          {"threads", Kind::Int, "0", 0, 1024, {}, "worker pool size, 0 = VQHT_THREADS or all cores"}}},
        {"optimizer",
         {{"kind", Kind::Choice, "gradient", 0, 0, {"gradient", "nelder-mead", "spsa"}},
          {"restarts", Kind::Int, "8", 1, 100000},
          {"max_iters", Kind::Int, "5000", 1, 1e8},
          {"tol", Kind::Real, "1e-6", 0, 1},
          {"patience", Kind::Int, "50", 1, 1e6},
          {"fd_step", Kind::Real, "1e-4", 1e-12, 1},
          {"receiver_starts", Kind::Int, "8", 1, 1000, {}, "receiver fits before joint optimization (bosonic)"}}},
        {"discriminate",
         {{"channel0", Kind::Channel, kRequired},
          {"channel1", Kind::Channel, kRequired},
          {"reference_qubits", Kind::Int, "1", 0, 6, {}, "probe qubits beyond those the channels act on"},
          {"probe_layers", Kind::Int, "2", 1, 50},
          {"measure_layers", Kind::Int, "3", 1, 50}}},
        {"diamond-estimate",
         {{"family", Kind::Choice, kRequired, 0, 0, {"phase_flip", "haar_unitary"}},
          {"p_grid", Kind::RealList, "0.1,0.3,0.5,0.7,0.9", 0, 1, {}, "phase_flip probabilities"},
          {"seeds", Kind::IntList, "1000,1001,1002,1003,1004,1005,1006,1007,1008,1009", 0, 1e15, {},
           "haar_unitary seeds"},
          {"probe_qubits", Kind::Int, "0", 0, 8, {}, "0 = 4 for phase_flip, 2 for haar_unitary"},
          {"probe_layers", Kind::Int, "2", 1, 50},
          {"measure_layers", Kind::Int, "3", 1, 50}}},
        {"illuminate",
         {{"n_s", Kind::Real, "0.1", 1e-6, 10},
          {"eta", Kind::Real, "1e-3", 0, 1},
          {"nb_grid", Kind::RealList, "0.5,1,2", 0, 10},
          {"cutoff", Kind::Int, "20", 4, 60},
          {"readout", Kind::Choice, "parity", 0, 0, {"parity", "vacuum"}},
          {"lambda", Kind::Real, "100", 0, 1e12, {}, "photon-constraint penalty weight"},
          {"qfi", Kind::Flag, "true"},
          {"save_probes", Kind::Flag, "true"}}},
        {"noise-sweep",
         {{"n_s", Kind::Real, "0.1", 1e-6, 10},
          {"eta", Kind::Real, "1e-3", 0, 1},
          {"n_b", Kind::Real, "1", 0, 10},
          {"cutoff", Kind::Int, "20", 4, 60},
          {"readout", Kind::Choice, "parity", 0, 0, {"parity", "vacuum"}},
          {"lambda", Kind::Real, "100", 0, 1e12},
          {"variances", Kind::RealList, "0,1e-4,1e-3,1e-2", 0, 10},
          {"samples", Kind::Int, "200", 1, 1e7}}},
        {"multi",
         {{"hypotheses", Kind::Int, "3", 2, 8},
          {"unitary_seed", Kind::Int, "2024", 0, 1e15},
          {"probe_qubits", Kind::Int, "4", 2, 6, {}, "GHZ probe size; the channels act on the first two"},
          {"layers", Kind::IntList, "5,7", 1, 50}}},
        {"generalize-sweep",
         {{"probe_file", Kind::File, kRequired, 0, 0, {}, "probe written by an illuminate run"},
          {"n_s", Kind::Real, "0.1", 1e-6, 10, {}, "TMSV reference signal photons"},
          {"nb_grid", Kind::RealList, "0.5,1,1.5,2", 0, 10},
          {"eta_grid", Kind::RealList, "0,1e-3,1e-2,0.1", 0, 1}}},
        {"oracle",
         {{"query", Kind::Choice, kRequired, 0, 0,
           {"trace-distance", "helstrom", "fidelity", "chernoff", "diamond-unitary", "diamond-phase-flip",
            "tmsv-reference"}},
          {"state0", Kind::Text, "-", 0, 0, {}, "matrix file (density or ket)"},
          {"state1", Kind::Text, "-", 0, 0, {}, "matrix file (density or ket)"},
          {"unitary", Kind::Text, "-", 0, 0, {}, "matrix file"},
          {"p", Kind::Real, "0.1", 0, 1},
          {"n_s", Kind::Real, "0.1", 1e-6, 10},
          {"cutoff", Kind::Int, "20", 4, 60}}},
    };
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

std::vector<std::string> words(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

double to_real(const std::string& s, const std::string& where)
{
    double v = 0.0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ValidationError(where + ": '" + s + "' is not a finite number");
    }
    return v;
}

long to_integer(const std::string& s, const std::string& where)
{
    long v = 0;
    const auto t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ValidationError(where + ": '" + s + "' is not an integer");
    }
    return v;
}

void check_range(double v, const KeySpec& k, const std::string& where)
{
    if (v < k.lo || v > k.hi) {
        std::ostringstream msg;
        msg << where << ": " << v << " outside [" << k.lo << ", " << k.hi << "]";
        throw ValidationError(msg.str());
    }
}

void check_channel(const std::string& spec, const std::string& where)
{
    const auto w = words(spec);
    if (w.empty()) throw ValidationError(where + ": empty channel");
    auto args = [&](std::size_t n) {
        if (w.size() != n + 1) {
            throw ValidationError(where + ": '" + w[0] + "' takes " + std::to_string(n) + " argument(s)");
        }
        std::vector<double> v;
        for (std::size_t i = 1; i < w.size(); ++i) v.push_back(to_real(w[i], where));
        return v;
    };
    auto prob = [&](double p) {
        if (p < 0.0 || p > 1.0) throw ValidationError(where + ": probability outside [0, 1]");
    };
    if (w[0] == "identity") {
        if (w.size() > 2) throw ValidationError(where + ": identity takes at most one argument");
        if (w.size() == 2) {
            const long n = to_integer(w[1], where);
            if (n < 1 || n > 4) throw ValidationError(where + ": identity qubits outside [1, 4]");
        }
    } else if (w[0] == "phase_flip" || w[0] == "depolarizing" || w[0] == "amplitude_damping") {
        prob(args(1)[0]);
    } else if (w[0] == "pauli") {
        const auto p = args(4);
        for (double x : p) prob(x);
        if (std::abs(p[0] + p[1] + p[2] + p[3] - 1.0) > 1e-9) {
            throw ValidationError(where + ": pauli probabilities must sum to 1");
        }
    } else if (w[0] == "haar_unitary") {
        if (w.size() != 3) throw ValidationError(where + ": haar_unitary takes <qubits> <seed>");
        const long n = to_integer(w[1], where);
        if (n < 1 || n > 4) throw ValidationError(where + ": haar_unitary qubits outside [1, 4]");
        if (to_integer(w[2], where) < 0) throw ValidationError(where + ": negative seed");
    } else {
        throw ValidationError(where + ": unknown channel '" + w[0] + "'");
    }
}

std::string normalize(const KeySpec& k, const std::string& raw, const std::string& where)
{
    const std::string v = trim(raw);
    switch (k.kind) {
    case Kind::Int:
        check_range(static_cast<double>(to_integer(v, where)), k, where);
        return v;
    case Kind::Real:
        check_range(to_real(v, where), k, where);
        return v;
    case Kind::IntList:
    case Kind::RealList: {
        const auto items = split(v, ',');
        if (items.empty()) throw ValidationError(where + ": empty list");
        std::string out;
        for (const auto& item : items) {
            const double x = k.kind == Kind::IntList ? static_cast<double>(to_integer(item, where)) : to_real(item, where);
            check_range(x, k, where);
            out += (out.empty() ? "" : ",") + item;
        }
        return out;
    }
    case Kind::Choice:
        if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end()) {
            std::string all;
            for (const auto& c : k.choices) all += (all.empty() ? "" : ", ") + c;
            throw ValidationError(where + ": '" + v + "' not one of {" + all + "}");
        }
        return v;
    case Kind::Flag:
        if (v == "true" || v == "yes" || v == "1") return "true";
        if (v == "false" || v == "no" || v == "0") return "false";
        throw ValidationError(where + ": '" + v + "' is not a boolean");
    case Kind::Channel:
        check_channel(v, where);
        return v;
    case Kind::File:
        if (!std::filesystem::is_regular_file(v)) throw ValidationError(where + ": cannot read '" + v + "'");
        return v;
    case Kind::Text:
        if (v.empty()) throw ValidationError(where + ": empty value");
        return v;
    }
    return v;
}

void check_oracle_inputs(const Settings& s)
{
    const auto& q = s.text("oracle.query");
    auto need = [&](const std::string& key) {
        const auto& path = s.text("oracle." + key);
        if (path == "-") throw ValidationError("oracle." + key + ": required by query '" + q + "'");
        if (!std::filesystem::is_regular_file(path)) {
            throw ValidationError("oracle." + key + ": cannot read '" + path + "'");
        }
    };
    if (q == "trace-distance" || q == "helstrom" || q == "fidelity" || q == "chernoff") {
        need("state0");
        need("state1");
    } else if (q == "diamond-unitary") {
        need("unitary");
    }
}

}  // namespace

const std::string& Settings::text(const std::string& key) const
{
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("setting '" + key + "' not in schema");
    return it->second;
}

double Settings::real(const std::string& key) const { return to_real(text(key), key); }
long Settings::integer(const std::string& key) const { return to_integer(text(key), key); }
bool Settings::flag(const std::string& key) const { return text(key) == "true"; }

std::vector<double> Settings::reals(const std::string& key) const
{
    std::vector<double> out;
    for (const auto& item : split(text(key), ',')) out.push_back(to_real(item, key));
    return out;
}

std::vector<long> Settings::integers(const std::string& key) const
{
    std::vector<long> out;
    for (const auto& item : split(text(key), ',')) out.push_back(to_integer(item, key));
    return out;
}

Settings parse_settings(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    std::string scenario;
    if (const auto run = tree.get_child_optional("run")) {
        if (const auto v = run->get_optional<std::string>("scenario")) scenario = trim(*v);
    }
    if (scenario.empty()) throw ValidationError("run.scenario: required");

    const auto& sch = schema();
    const std::set<std::string> allowed{"run", "optimizer", scenario};
    for (const auto& [name, section] : tree) {
        if (section.empty()) throw ValidationError("'" + name + "': keys must live inside a [section]");
        if (!sch.count(name)) throw ValidationError("unknown section [" + name + "]");
        if (!allowed.count(name)) {
            throw ValidationError("section [" + name + "] does not apply to scenario '" + scenario + "'");
        }
        for (const auto& [key, value] : section) {
            const auto& keys = sch.at(name);
            const bool known =
                std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
            if (!known) throw ValidationError("unknown key '" + key + "' in [" + name + "]");
            if (!value.empty()) throw ValidationError(name + "." + key + ": nested values are not allowed");
        }
    }

    Settings out;
    for (const auto& name : {std::string("run"), std::string("optimizer"), scenario}) {
        if (!sch.count(name)) break;  // unknown scenario; rejected by the choice check below
        const auto section = tree.get_child_optional(name);
        for (const auto& k : sch.at(name)) {
            const std::string where = name + "." + k.name;
            std::optional<std::string> raw;
            if (section) {
                if (const auto v = section->get_optional<std::string>(k.name)) raw = *v;
            }
            if (!raw) {
                if (k.fallback.empty()) throw ValidationError(where + ": required");
                raw = k.fallback;
            }
            out.set(where, normalize(k, *raw, where));
        }
    }
    if (scenario == "oracle") check_oracle_inputs(out);
    return out;
}

Settings load_settings(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_settings(text.str());
}

std::string schema_text()
{
    std::ostringstream out;
    for (const auto& [name, keys] : schema()) {
        out << "[" << name << "]\n";
        for (const auto& k : keys) {
            out << "  " << k.name << " = " << (k.fallback.empty() ? "<required>" : k.fallback);
            std::string note = k.help;
            if (!k.choices.empty()) {
                if (!note.empty()) note += "; ";
                note += "one of:";
                for (const auto& c : k.choices) note += " " + c;
            }
            if (!note.empty()) out << "   # " << note;
            out << "\n";
        }
    }
    return out.str();
}

const std::vector<std::string>& scenario_names() { return kScenarios; }

}  // namespace vqht::cli
