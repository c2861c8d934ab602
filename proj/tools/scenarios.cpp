#include "scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vqht/engine.hpp"
#include "vqht/errors.hpp"
#include "vqht/matrix_io.hpp"
#include "vqht/oracles.hpp"
#include "vqht/parallel.hpp"

namespace vqht::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Collects rows in memory and writes the file once, so a failed scenario
/// never leaves a half-written table behind.
class Csv {
public:
    Csv(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {}

    void row(const std::vector<std::string>& cells)
    {
        if (cells.size() != header_.size()) throw InternalError("csv row width mismatch in " + name_);
        rows_.push_back(cells);
    }

    void write(const fs::path& dir, ScenarioOutput& out) const
    {
        std::ofstream f(dir / name_);
        if (!f) throw UsageError("cannot write " + (dir / name_).string());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) f << (i ? "," : "") << cells[i];
            f << "\n";
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        out.files.push_back(name_);
    }

private:
    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

OptimizerConfig optimizer(const Settings& s)
{
    OptimizerConfig cfg;
    cfg.kind = parse_optimizer(s.text("optimizer.kind"));
    cfg.restarts = static_cast<int>(s.integer("optimizer.restarts"));
    cfg.max_iters = static_cast<int>(s.integer("optimizer.max_iters"));
    cfg.tol = s.real("optimizer.tol");
    cfg.patience = static_cast<int>(s.integer("optimizer.patience"));
    cfg.fd_step = s.real("optimizer.fd_step");
    cfg.receiver_starts = static_cast<int>(s.integer("optimizer.receiver_starts"));
    cfg.threads = static_cast<int>(s.integer("run.threads"));
    return cfg;
}

std::uint64_t seed(const Settings& s) { return static_cast<std::uint64_t>(s.integer("run.seed")); }

struct NamedChannel {
    KrausChannel channel;
    int qubits;
};

NamedChannel make_channel(const std::string& spec)
{
    std::istringstream in(spec);
    std::string name;
    in >> name;
    if (name == "identity") {
        int n = 1;
        in >> n;
        return {KrausChannel::identity(std::vector<int>(static_cast<std::size_t>(n), 2)), n};
    }
    if (name == "phase_flip") {
        double p = 0;
        in >> p;
        return {phase_flip_channel(p), 1};
    }
    if (name == "depolarizing") {
        double p = 0;
        in >> p;
        return {pauli_channel(1.0 - 0.75 * p, p / 4, p / 4, p / 4), 1};
    }
    if (name == "pauli") {
        double a = 0, b = 0, c = 0, d = 0;
        in >> a >> b >> c >> d;
        return {pauli_channel(a, b, c, d), 1};
    }
    if (name == "amplitude_damping") {
        double g = 0;
        in >> g;
        Mat k0 = Mat::Zero(2, 2), k1 = Mat::Zero(2, 2);
        k0(0, 0) = 1.0;
        k0(1, 1) = std::sqrt(1.0 - g);
        k1(0, 1) = std::sqrt(g);
        return {KrausChannel({2}, {2}, {k0, k1}), 1};
    }
    if (name == "haar_unitary") {
        int n = 1;
        std::uint64_t sd = 0;
        in >> n >> sd;
        const std::vector<int> dims(static_cast<std::size_t>(n), 2);
        return {KrausChannel::unitary(dims, haar_random_unitary(1 << n, sd)), n};
    }
    throw ValidationError("unknown channel '" + name + "'");
}

std::vector<int> qubits(int n) { return std::vector<int>(static_cast<std::size_t>(n), 2); }

std::vector<int> with_ancilla(int ancilla_dim, const std::vector<int>& probe)
{
    std::vector<int> d{ancilla_dim};
    d.insert(d.end(), probe.begin(), probe.end());
    return d;
}

std::vector<int> first_n(int n)
{
    std::vector<int> t;
    for (int i = 0; i < n; ++i) t.push_back(i);
    return t;
}

void note_convergence(const OptimizationResult& r, const std::string& where, ScenarioOutput& out)
{
    if (r.converged) return;
    out.converged = false;
    out.warnings.push_back(where + ": optimizer hit max_iters before converging");
}

// ---------------------------------------------------------------------------

ScenarioOutput discriminate(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const auto c0 = make_channel(s.text("discriminate.channel0"));
    const auto c1 = make_channel(s.text("discriminate.channel1"));
    if (c0.qubits != c1.qubits) throw ValidationError("discriminate: channels act on different qubit counts");
    const auto probe_dims = qubits(c0.qubits + static_cast<int>(s.integer("discriminate.reference_qubits")));
    const auto prob = HypothesisProblem::discrete(
        {c0.channel, c1.channel}, first_n(c0.qubits),
        build_hardware_efficient_ansatz(probe_dims, static_cast<int>(s.integer("discriminate.probe_layers"))),
        build_hardware_efficient_ansatz(with_ancilla(2, probe_dims),
                                        static_cast<int>(s.integer("discriminate.measure_layers"))));
    const auto r = run_vqht(prob, optimizer(s), seed(s));
    note_convergence(r, "discriminate", out);
    const auto outs = prob.channel_outputs(r.theta);
    const double t = trace_distance(outs[0], outs[1]);

    Csv csv("discriminate.csv", {"T_ve", "estimate", "probe_true_trace_distance", "n_evals", "converged"});
    csv.row({num(r.cost), num(r.estimate), num(t), std::to_string(r.n_evals), r.converged ? "1" : "0"});
    csv.write(dir, out);

    Csv trace("cost_trace.csv", {"iteration", "best_T_ve"});
    for (const auto& [it, v] : r.cost_trace) trace.row({std::to_string(it), num(v)});
    trace.write(dir, out);

    write_matrix((dir / "probe.txt").string(), {"ket", probe_dims, prob.probe_ket(r.theta)});
    out.files.push_back("probe.txt");
    out.summary["T_ve"] = r.cost;
    out.summary["estimate"] = r.estimate;
    out.summary["probe_true_trace_distance"] = t;
    return out;
}

ScenarioOutput diamond_estimate(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const bool flip = s.text("diamond-estimate.family") == "phase_flip";
    int n_probe = static_cast<int>(s.integer("diamond-estimate.probe_qubits"));
    if (n_probe == 0) n_probe = flip ? 4 : 2;
    const int channel_qubits = flip ? 1 : 2;
    if (n_probe < channel_qubits) throw ValidationError("diamond-estimate.probe_qubits: too few for the channel");
    const auto probe_dims = qubits(n_probe);
    const int lp = static_cast<int>(s.integer("diamond-estimate.probe_layers"));
    const int lm = static_cast<int>(s.integer("diamond-estimate.measure_layers"));
    const auto cfg = optimizer(s);

    std::vector<double> grid;
    std::vector<long> seeds;
    if (flip) grid = s.reals("diamond-estimate.p_grid");
    else seeds = s.integers("diamond-estimate.seeds");
    const std::size_t n = flip ? grid.size() : seeds.size();

    Csv csv("diamond.csv", {flip ? "p" : "unitary_seed", "estimate", "analytic", "probe_true_trace_distance"});
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        KrausChannel e1 = KrausChannel::identity({2});
        double analytic = 0.0;
        if (flip) {
            e1 = phase_flip_channel(grid[i]);
            analytic = diamond_phase_flip(grid[i]);
        } else {
            const Mat u = haar_random_unitary(4, static_cast<std::uint64_t>(seeds[i]));
            e1 = KrausChannel::unitary({2, 2}, u);
            analytic = diamond_unitary(u);
        }
        const auto prob = HypothesisProblem::discrete(
            {KrausChannel::identity(qubits(channel_qubits)), e1}, first_n(channel_qubits),
            build_hardware_efficient_ansatz(probe_dims, lp), build_hardware_efficient_ansatz(with_ancilla(2, probe_dims), lm));
        const auto r = run_vqht(prob, cfg, seed(s) + i);
        note_convergence(r, "diamond-estimate row " + std::to_string(i), out);
        const auto outs = prob.channel_outputs(r.theta);
        csv.row({flip ? num(grid[i]) : std::to_string(seeds[i]), num(r.estimate), num(analytic),
                 num(trace_distance(outs[0], outs[1]))});
        if (analytic > 0) worst = std::max(worst, std::abs(r.estimate - analytic) / analytic);
    }
    csv.write(dir, out);
    out.summary["rows"] = n;
    out.summary["max_relative_error"] = worst;
    return out;
}

struct IlluminationSetup {
    double n_s, eta;
    int cutoff;
    Readout readout;
    double lambda;
};

IlluminationSetup illumination_setup(const Settings& s, const std::string& sec)
{
    return {s.real(sec + ".n_s"), s.real(sec + ".eta"), static_cast<int>(s.integer(sec + ".cutoff")),
            s.text(sec + ".readout") == "parity" ? Readout::Parity : Readout::Vacuum, s.real(sec + ".lambda")};
}

HypothesisProblem illumination_problem(const IlluminationSetup& u, double n_b)
{
    return HypothesisProblem::bosonic({{0.0, n_b}, {u.eta, n_b}}, build_illumination_probe(u.cutoff),
                                      build_illumination_measure(u.cutoff), PhotonConstraint{0, u.n_s, u.lambda},
                                      u.readout);
}

/// Dominant eigenvector of a (numerically) pure density matrix, phase-fixed
/// so its largest component is real and positive.
Vec dominant_ket(const Mat& rho)
{
    Eigen::SelfAdjointEigenSolver<Mat> es(rho / rho.trace().real());
    Vec v = es.eigenvectors().col(es.eigenvalues().size() - 1);
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    return v * (std::abs(v(k)) / v(k));
}

double safe_qfi(const FockState& probe, double n_b, double eta, ScenarioOutput& out, const std::string& where)
{
    const double d = std::min(1e-3, std::min(eta, 1.0 - eta) / 2.0);
    if (d <= 0.0) {
        out.warnings.push_back(where + ": QFI needs 0 < eta < 1; reported as nan");
        return std::nan("");
    }
    const auto q = qfi_illumination(probe, n_b, eta, d);
    if (!q.richardson_ok) out.warnings.push_back(where + ": QFI step refinement disagrees by more than 1%");
    if (q.ill_conditioned) out.warnings.push_back(where + ": QFI dominated by a near-null spectrum");
    return q.value;
}

void check_cutoff(const std::vector<FockState>& states, int cutoff, const std::string& where, ScenarioOutput& out)
{
    int top = cutoff;
    for (const auto& st : states) {
        for (int c : st.cutoffs()) top = std::max(top, c);
    }
    if (top > cutoff) {
        out.warnings.push_back(where + ": cutoff escalated from " + std::to_string(cutoff) + " to " +
                               std::to_string(top));
    }
}

ScenarioOutput illuminate(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const auto u = illumination_setup(s, "illuminate");
    const bool with_qfi = s.flag("illuminate.qfi");
    const auto cfg = optimizer(s);
    const auto ref = tmsv_state(u.n_s, u.cutoff);

    Csv csv("illuminate.csv", {"N_B", "T_opt", "T_tmsv", "Q_opt", "Q_tmsv", "QFI_opt", "QFI_tmsv",
                               "fidelity_to_tmsv", "N_I", "N_S", "T_ve"});
    auto rows = nlohmann::ordered_json::array();
    const auto grid = s.reals("illuminate.nb_grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double nb = grid[i];
        const std::string where = "N_B=" + num(nb);
        const auto prob = illumination_problem(u, nb);
        const auto r = run_vqht(prob, cfg, seed(s) + i);
        note_convergence(r, where, out);

        const auto probe = prob.probe_fock(r.theta);
        const auto outs = prob.fock_outputs(r.theta);
        const auto ref_outs = std::vector<FockState>{illumination_channel(ref, 0.0, nb),
                                                     illumination_channel(ref, u.eta, nb)};
        check_cutoff(outs, u.cutoff, where, out);
        const double t_opt = trace_distance(outs[0], outs[1]);
        const double t_ref = trace_distance(ref_outs[0], ref_outs[1]);
        const auto c_opt = chernoff_bound(outs[0], outs[1]);
        const auto c_ref = chernoff_bound(ref_outs[0], ref_outs[1]);
        const double qfi_opt = with_qfi ? safe_qfi(probe, nb, u.eta, out, where) : std::nan("");
        const double qfi_ref = with_qfi ? safe_qfi(ref, nb, u.eta, out, where) : std::nan("");
        const double fid = uhlmann_fidelity(probe, ref);
        const double n_i = mean_photon(probe, 1);
        const double n_s = mean_photon(probe, 0);
        csv.row({num(nb), num(t_opt), num(t_ref), num(c_opt.q), num(c_ref.q), num(qfi_opt), num(qfi_ref), num(fid),
                 num(n_i), num(n_s), num(r.cost)});

        if (s.flag("illuminate.save_probes")) {
            const std::string name = "probe_nb_" + num(nb) + ".txt";
            write_matrix((dir / name).string(), {"ket", probe.cutoffs(), dominant_ket(probe.data())});
            out.files.push_back(name);
        }
        rows.push_back({{"N_B", nb},
                        {"trace_ratio", t_opt / t_ref},
                        {"chernoff_ratio", c_opt.log_q / c_ref.log_q},
                        {"constraint_residual", r.constraint_residual.value_or(0.0)},
                        {"fidelity_to_tmsv", fid}});
    }
    csv.write(dir, out);
    out.summary["points"] = rows;
    return out;
}

ScenarioOutput noise_sweep(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const auto u = illumination_setup(s, "noise-sweep");
    const auto prob = illumination_problem(u, s.real("noise-sweep.n_b"));
    const auto r = run_vqht(prob, optimizer(s), seed(s));
    note_convergence(r, "noise-sweep", out);
    const auto rows = noise_robustness(r, prob, s.reals("noise-sweep.variances"),
                                       static_cast<int>(s.integer("noise-sweep.samples")), seed(s) + 1);
    Csv csv("noise.csv", {"variance", "mean_T_ve", "ratio"});
    for (const auto& row : rows) csv.row({num(row.variance), num(row.mean_cost), num(row.ratio)});
    csv.write(dir, out);
    out.summary["noiseless_T_ve"] = r.cost;
    out.summary["worst_ratio"] = rows.empty() ? 1.0 : rows.back().ratio;
    return out;
}

ScenarioOutput multi(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const int k = static_cast<int>(s.integer("multi.hypotheses"));
    const auto base_seed = static_cast<std::uint64_t>(s.integer("multi.unitary_seed"));
    const int n = static_cast<int>(s.integer("multi.probe_qubits"));
    std::vector<KrausChannel> channels;
    for (int i = 0; i < k; ++i) {
        channels.push_back(KrausChannel::unitary({2, 2}, haar_random_unitary(4, base_seed + static_cast<std::uint64_t>(i))));
    }
    const Eigen::Index dim = Eigen::Index(1) << n;
    Vec ghz = Vec::Zero(dim);
    ghz(0) = ghz(dim - 1) = 1.0 / std::sqrt(2.0);
    const auto probe_dims = qubits(n);
    const auto meas_dims = with_ancilla(k, probe_dims);

    const auto fixed = HypothesisProblem::fixed_probe(channels, {0, 1}, probe_dims, ghz,
                                                      build_hardware_efficient_ansatz(meas_dims, 1));
    const double opt = povm_fixed_point(fixed.channel_outputs(RVec()), 5000, 1e-14).success;

    Csv csv("multi.csv", {"layers", "success", "povm_optimum", "gap"});
    const auto cfg = optimizer(s);
    const auto layers = s.integers("multi.layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto prob = HypothesisProblem::fixed_probe(
            channels, {0, 1}, probe_dims, ghz, build_hardware_efficient_ansatz(meas_dims, static_cast<int>(layers[i])));
        const auto r = run_vqht(prob, cfg, seed(s) + i);
        note_convergence(r, "multi layers=" + std::to_string(layers[i]), out);
        csv.row({std::to_string(layers[i]), num(r.cost), num(opt), num(opt - r.cost)});
        out.summary["success_" + std::to_string(layers[i]) + "_layers"] = r.cost;
    }
    csv.write(dir, out);
    out.summary["povm_optimum"] = opt;
    out.summary["unitary_seeds"] = {base_seed, base_seed + static_cast<std::uint64_t>(k) - 1};
    return out;
}

FockState load_probe(const std::string& path)
{
    StoredMatrix m;
    try {
        m = read_matrix(path);
    } catch (const UsageError& e) {
        throw ValidationError(e.what());
    }
    if (m.dims.size() != 2) throw ValidationError(path + ": probe must be a two-mode state");
    if (m.kind != "ket" && m.kind != "density") throw ValidationError(path + ": expected kind ket or density");
    const Mat rho = m.kind == "ket" ? Mat(m.data * m.data.adjoint()) : m.data;
    return FockState(m.dims, rho / rho.trace().real());
}

ScenarioOutput generalize_sweep(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    const auto probe = load_probe(s.text("generalize-sweep.probe_file"));
    // Canonicalized like a loaded probe, so a stored unit-trace TMSV
    // reproduces the reference bit for bit.
    const auto raw_ref = tmsv_state(s.real("generalize-sweep.n_s"), probe.cutoff(0));
    const Mat unit = raw_ref.normalized();
    const FockState ref(raw_ref.cutoffs(), unit / unit.trace().real());
    const auto nbs = s.reals("generalize-sweep.nb_grid");
    const auto etas = s.reals("generalize-sweep.eta_grid");
    const int points = static_cast<int>(nbs.size() * etas.size());

    struct Ratios {
        double trace = 1.0, chernoff = 1.0;
    };
    std::vector<Ratios> res(static_cast<std::size_t>(points));
    parallel_for(points, worker_count(static_cast<int>(s.integer("run.threads"))), [&](int idx) {
        const double nb = nbs[static_cast<std::size_t>(idx) / etas.size()];
        const double eta = etas[static_cast<std::size_t>(idx) % etas.size()];
        if (eta == 0.0) return;  // identical hypotheses: 0/0, reported as 1
        const auto p0 = illumination_channel(probe, 0.0, nb), p1 = illumination_channel(probe, eta, nb);
        const auto t0 = illumination_channel(ref, 0.0, nb), t1 = illumination_channel(ref, eta, nb);
        auto& r = res[static_cast<std::size_t>(idx)];
        r.trace = trace_distance(p0, p1) / trace_distance(t0, t1);
        r.chernoff = chernoff_bound(p0, p1).log_q / chernoff_bound(t0, t1).log_q;
    });

    Csv csv("generalize.csv", {"N_B", "eta", "trace_ratio_to_tmsv", "chernoff_ratio_to_tmsv"});
    double worst = 1.0;
    for (int idx = 0; idx < points; ++idx) {
        const auto& r = res[static_cast<std::size_t>(idx)];
        csv.row({num(nbs[static_cast<std::size_t>(idx) / etas.size()]),
                 num(etas[static_cast<std::size_t>(idx) % etas.size()]), num(r.trace), num(r.chernoff)});
        worst = std::min(worst, r.trace);
    }
    csv.write(dir, out);
    out.summary["points"] = points;
    out.summary["min_trace_ratio"] = worst;
    return out;
}

Mat load_state(const std::string& path, std::vector<int>& dims)
{
    StoredMatrix m;
    try {
        m = read_matrix(path);
    } catch (const UsageError& e) {
        throw ValidationError(e.what());
    }
    dims = m.dims;
    if (m.kind == "ket") return m.data * m.data.adjoint();
    return m.data;
}

ScenarioOutput oracle(const Settings& s, const fs::path& dir)
{
    ScenarioOutput out;
    Csv csv("oracle.csv", {"quantity", "value"});
    for (const auto& [name, value] : oracle_query(s)) {
        csv.row({name, num(value)});
        out.summary[name] = value;
    }
    csv.write(dir, out);
    return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> oracle_query(const Settings& s)
{
    const auto& q = s.text("oracle.query");
    std::vector<std::pair<std::string, double>> r;
    if (q == "diamond-phase-flip") {
        r.emplace_back("diamond_distance", diamond_phase_flip(s.real("oracle.p")));
        return r;
    }
    if (q == "diamond-unitary") {
        std::vector<int> dims;
        r.emplace_back("diamond_distance", diamond_unitary(load_state(s.text("oracle.unitary"), dims)));
        return r;
    }
    if (q == "tmsv-reference") {
        const auto st = tmsv_state(s.real("oracle.n_s"), static_cast<int>(s.integer("oracle.cutoff")));
        const auto sv = schmidt_values(st, 5);
        for (std::size_t i = 0; i < sv.size(); ++i) r.emplace_back("schmidt_" + std::to_string(i), sv[i]);
        r.emplace_back("entropy", von_neumann_entropy(reduced_mode(st, 0)));
        return r;
    }
    std::vector<int> d0, d1;
    const Mat a = load_state(s.text("oracle.state0"), d0);
    const Mat b = load_state(s.text("oracle.state1"), d1);
    if (d0 != d1 || a.rows() != b.rows()) throw ValidationError("oracle: state dimensions differ");
    // Validates Hermiticity, trace and positivity.
    const DensityMatrix r0(d0, a), r1(d1, b);
    if (q == "trace-distance") {
        r.emplace_back("trace_distance", trace_distance(r0, r1));
    } else if (q == "fidelity") {
        r.emplace_back("fidelity", uhlmann_fidelity(a, b));
    } else if (q == "chernoff") {
        const auto c = chernoff_bound(a, b);
        r.emplace_back("Q", c.q);
        r.emplace_back("s", c.s);
        r.emplace_back("log_Q", c.log_q);
    } else if (q == "helstrom") {
        const auto h = helstrom(a, b);
        r.emplace_back("min_error", h.min_error);
        r.emplace_back("alpha", h.rates.alpha);
        r.emplace_back("beta", h.rates.beta);
    }
    return r;
}

ScenarioOutput run_scenario(const Settings& s, const fs::path& out_dir)
{
    const auto& name = s.scenario();
    if (name == "discriminate") return discriminate(s, out_dir);
    if (name == "diamond-estimate") return diamond_estimate(s, out_dir);
    if (name == "illuminate") return illuminate(s, out_dir);
    if (name == "noise-sweep") return noise_sweep(s, out_dir);
    if (name == "multi") return multi(s, out_dir);
    if (name == "generalize-sweep") return generalize_sweep(s, out_dir);
    if (name == "oracle") return oracle(s, out_dir);
    throw ValidationError("unknown scenario '" + name + "'");
}

}  // namespace vqht::cli
