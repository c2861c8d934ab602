// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// below; detail lines are indented under each verdict.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "crosscheck.hpp"
#include "vqht/engine.hpp"
#include "vqht/oracles.hpp"

using namespace vqht;

namespace {

namespace pinned {
constexpr double c1_estimate_rel = 0.05;
constexpr double c1_trace_rel = 0.02;
constexpr double c1_seconds = 300.0;
constexpr double c2_rel = 0.05;
constexpr double c2_seconds = 600.0;
constexpr double c3_trace_ratio = 0.99;
constexpr double c3_chernoff_dev = 0.02;
constexpr double c3_residual = 1e-3;
constexpr double c3_seconds = 1800.0;
constexpr double c4_schmidt = 1e-7;
constexpr double c4_entropy = 1e-9;
constexpr double c5_band_lo = 0.095, c5_band_hi = 0.105;
constexpr double c5_fidelity = 1.0 - 1e-3;
constexpr double c6_slack = 1e-9;
constexpr double c7_gap = 0.02;
constexpr double c7_layer_slack = 0.005;
constexpr double c8_slack = 0.02;
constexpr double c10_moments = 1e-5;
constexpr double c10_vacuum = 1e-5;
}  // namespace pinned

struct Verdict {
    bool pass = true;
    std::string summary;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void detail(const std::string& s) { std::printf("    %s\n", s.c_str()); }

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

OptimizerConfig gradient_config(int restarts)
{
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::Gradient;
    cfg.restarts = restarts;
    return cfg;
}

Mat pauli_z()
{
    Mat z = Mat::Identity(2, 2);
    z(1, 1) = -1.0;
    return z;
}

// ---------------------------------------------------------------------------

Verdict phase_flip_diamond()
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    // q0 ancilla, q1..q4 probe; the channel acts on q1.
    const std::vector<int> probe_dims(4, 2), meas_dims(5, 2);
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto prob = HypothesisProblem::discrete({KrausChannel::identity({2}), phase_flip_channel(p)}, {0},
                                                      build_hardware_efficient_ansatz(probe_dims, 2),
                                                      build_hardware_efficient_ansatz(meas_dims, 2));
        const auto r = run_vqht(prob, gradient_config(4), 101);
        const auto outs = prob.channel_outputs(r.theta);
        const double t = trace_distance(outs[0], outs[1]);
        const double want = diamond_phase_flip(p);
        const double rel_est = std::abs(r.estimate - want) / want;
        const double rel_t = std::abs(t - p) / p;
        const bool ok = rel_est <= pinned::c1_estimate_rel && rel_t <= pinned::c1_trace_rel;
        v.pass = v.pass && ok;
        detail(fmt("p=%.1f  2T^ve=%.6f  2p=%.6f  rel=%.2e  probe T=%.6f  rel=%.2e  %s", p, r.estimate, want, rel_est, t,
                   rel_t, ok ? "ok" : "MISS"));
    }
    const double secs = seconds_since(t0);
    v.pass = v.pass && secs < pinned::c1_seconds;
    v.summary = fmt("5 values of p within %.0f%%/%.0f%%, %.1f s (limit %.0f s)", 100 * pinned::c1_estimate_rel,
                    100 * pinned::c1_trace_rel, secs, pinned::c1_seconds);
    return v;
}

Verdict unitary_diamond()
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    // A unitary channel attains its diamond distance without a reference
    // system, so the probe register is the two channel qubits.
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Mat u = haar_random_unitary(4, 1000 + s);
        const auto prob = HypothesisProblem::discrete(
            {KrausChannel::identity({2, 2}), KrausChannel::unitary({2, 2}, u)}, {0, 1},
            build_hardware_efficient_ansatz({2, 2}, 3), build_hardware_efficient_ansatz({2, 2, 2}, 3));
        const auto r = run_vqht(prob, gradient_config(8), 202);
        const double d = diamond_unitary(u);
        const double rel = std::abs(r.estimate - d) / d;
        worst = std::max(worst, rel);
        v.pass = v.pass && rel <= pinned::c2_rel;
        detail(fmt("seed=%llu  2T^ve=%.6f  circle=%.6f  rel=%.2e", static_cast<unsigned long long>(1000 + s),
                   r.estimate, d, rel));
    }
    const double secs = seconds_since(t0);
    v.pass = v.pass && secs < pinned::c2_seconds;
    v.summary = fmt("10 Haar unitaries, worst rel error %.2e (limit %.0e), %.1f s", worst, pinned::c2_rel, secs);
    return v;
}

struct IlluminationRun {
    double n_b = 0.0;
    HypothesisProblem problem;
    OptimizationResult result;
};

HypothesisProblem illumination_problem(double n_b)
{
    return HypothesisProblem::bosonic({{0.0, n_b}, {1e-3, n_b}}, build_illumination_probe(20),
                                      build_illumination_measure(20), PhotonConstraint{0, 0.1, 100.0},
                                      Readout::Parity);
}

RVec tmsv_theta()
{
    RVec th = RVec::Zero(6);
    th(4) = std::asinh(std::sqrt(0.1));
    return th;
}

struct ProbeScore {
    double t = 0.0, ln_q = 0.0, t_ref = 0.0, ln_q_ref = 0.0, fidelity = 0.0, n_s = 0.0, n_i = 0.0;
    double t_ratio() const { return t / t_ref; }
    double q_ratio() const { return ln_q / ln_q_ref; }
};

ProbeScore score_probe(const HypothesisProblem& p, const RVec& theta)
{
    ProbeScore s;
    const auto outs = p.fock_outputs(theta);
    const auto ref = p.fock_outputs(tmsv_theta());
    s.t = trace_distance(outs[0], outs[1]);
    s.t_ref = trace_distance(ref[0], ref[1]);
    s.ln_q = chernoff_bound(outs[0], outs[1]).log_q;
    s.ln_q_ref = chernoff_bound(ref[0], ref[1]).log_q;
    const auto probe = p.probe_fock(theta);
    s.fidelity = uhlmann_fidelity(probe, p.probe_fock(tmsv_theta()));
    s.n_s = mean_photon(probe, 0);
    s.n_i = mean_photon(probe, 1);
    return s;
}

Verdict illumination(std::vector<IlluminationRun>& runs)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    for (double nb : {0.5, 1.0, 2.0}) {
        auto prob = illumination_problem(nb);
        OptimizerConfig cfg = gradient_config(16);
        cfg.tol = 1e-10;
        const auto r = run_vqht(prob, cfg, 303);
        const auto s = score_probe(prob, r.theta);
        const double resid = *r.constraint_residual;
        const bool ok = s.t_ratio() >= pinned::c3_trace_ratio &&
                        std::abs(s.q_ratio() - 1.0) <= pinned::c3_chernoff_dev && resid <= pinned::c3_residual;
        v.pass = v.pass && ok;
        detail(fmt("N_B=%.1f  T^ve/eta=%.5f  T/T_tmsv=%.4f  lnQ/lnQ_tmsv=%.4f  |N_S-0.1|=%.1e  F=%.4f  N_I=%.4f  %s", nb,
                   r.cost / 1e-3, s.t_ratio(), s.q_ratio(), resid, s.fidelity, s.n_i, ok ? "ok" : "MISS"));
        runs.push_back({nb, std::move(prob), r});
    }
    const double secs = seconds_since(t0);
    v.pass = v.pass && secs < pinned::c3_seconds;
    v.summary = fmt("3 bath strengths, T ratio >= %.2f, |Q-exponent ratio - 1| <= %.2f, %.1f s", pinned::c3_trace_ratio,
                    pinned::c3_chernoff_dev, secs);
    return v;
}

Verdict tmsv_reference()
{
    const auto s = apply_bosonic_gate(fock_vacuum(2, 20), gate::TwoModeSqueeze{0, 1, std::asinh(std::sqrt(0.1)), 0.0});
    const double want[] = {9.09090909e-1, 8.26446281e-2, 7.51314801e-3, 6.83013455e-4, 6.20921323e-5};
    const auto sv = schmidt_values(s, 5);
    Verdict v;
    double worst = 0.0;
    for (int n = 0; n < 5; ++n) worst = std::max(worst, std::abs(sv[static_cast<std::size_t>(n)] - want[n]));
    const double ent = von_neumann_entropy(reduced_mode(s, 0));
    const double ent_err = std::abs(ent - 0.33509970612111517);
    detail(fmt("Schmidt: %.9e %.9e %.9e %.9e %.9e", sv[0], sv[1], sv[2], sv[3], sv[4]));
    detail(fmt("entropy: %.17f", ent));
    v.pass = worst <= pinned::c4_schmidt && ent_err <= pinned::c4_entropy;
    v.summary = fmt("max Schmidt error %.1e, entropy error %.1e", worst, ent_err);
    return v;
}

Verdict red_square(const std::vector<IlluminationRun>& runs)
{
    Verdict v;
    const auto prob = illumination_problem(1.0);
    // Idler-displaced TMSV: alpha_S = -e^{i phi} tanh(r) conj(alpha_I) cancels
    // the signal displacement after squeezing, leaving N_S = sinh^2 r and a
    // coherent shift alpha_I / cosh r on the idler.
    const double r = std::asinh(std::sqrt(0.1));
    const double phi = 0.0;
    const double target_ni = 0.17;
    const double amp = std::sqrt((target_ni - 0.1)) * std::cosh(r);
    const cplx alpha_i(amp, 0.0);
    const cplx alpha_s = -std::polar(1.0, phi) * std::tanh(r) * std::conj(alpha_i);
    RVec th(6);
    th << alpha_s.real(), alpha_s.imag(), alpha_i.real(), alpha_i.imag(), r, phi;

    const auto s = score_probe(prob, th);
    const double resid = std::abs(s.n_s - 0.1);
    const bool outside = s.n_i < pinned::c5_band_lo || s.n_i > pinned::c5_band_hi;
    v.pass = outside && s.fidelity < pinned::c5_fidelity && s.t_ratio() >= pinned::c3_trace_ratio &&
             std::abs(s.q_ratio() - 1.0) <= pinned::c3_chernoff_dev && resid <= pinned::c3_residual;
    detail(fmt("witness: N_S=%.6f  N_I=%.4f  F=%.4f  T/T_tmsv=%.6f  lnQ/lnQ_tmsv=%.6f", s.n_s, s.n_i, s.fidelity,
               s.t_ratio(), s.q_ratio()));
    for (const auto& run : runs) {
        if (run.n_b != 1.0) continue;
        const auto g = run.problem.probe_moments(run.result.theta);
        detail(fmt("optimizer at N_B=1: N_I=%.4f (reported only)", mean_photon_gaussian(g, 1)));
    }
    v.summary = fmt("probe with N_I=%.3f outside [%.3f, %.3f], F=%.3f, ratios within criterion-3 bounds", s.n_i,
                    pinned::c5_band_lo, pinned::c5_band_hi, s.fidelity);
    return v;
}

KrausChannel random_two_qubit_channel(std::uint64_t seed)
{
    const int n_kraus = 1 + static_cast<int>(seed % 3);
    const Mat u = haar_random_unitary(4 * n_kraus, seed);
    std::vector<Mat> ks;
    for (int k = 0; k < n_kraus; ++k) ks.push_back(u.block(4 * k, 0, 4, 4));
    return KrausChannel({2, 2}, {2, 2}, ks);
}

Verdict tve_upper_bound()
{
    Verdict v;
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi), u(-1.0, 1.0), pos(0.05, 1.0);

    double worst_qubit = -1.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        const auto prob = HypothesisProblem::discrete(
            {random_two_qubit_channel(2 * t), random_two_qubit_channel(2 * t + 1)}, {0, 1},
            build_hardware_efficient_ansatz({2, 2, 2}, 1), build_hardware_efficient_ansatz({2, 2, 2, 2}, 2));
        RVec th(prob.n_theta()), ph(prob.n_phi());
        for (Eigen::Index i = 0; i < th.size(); ++i) th(i) = ang(rng);
        for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = ang(rng);
        const auto outs = prob.channel_outputs(th);
        worst_qubit = std::max(worst_qubit, cost_tve(prob, th, ph) - trace_distance(outs[0], outs[1]));
    }

    double worst_bosonic = -1.0;
    for (int t = 0; t < 100; ++t) {
        const double eta = 0.5 * pos(rng), nb = pos(rng);
        const auto prob = HypothesisProblem::bosonic({{0.0, nb}, {eta, nb}}, build_illumination_probe(14),
                                                     build_illumination_measure(14), PhotonConstraint{},
                                                     t % 2 ? Readout::Parity : Readout::Vacuum);
        RVec th(6), ph(12);
        th << 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng), 0.3 * u(rng), 0.35 * std::abs(u(rng)), 3.0 * u(rng);
        for (int i = 0; i < 12; ++i) ph(i) = (i < 6 ? 0.5 : 2.0) * u(rng);
        const auto outs = prob.fock_outputs(th);
        worst_bosonic = std::max(worst_bosonic, cost_tve(prob, th, ph) - trace_distance(outs[0], outs[1]));
    }

    double worst_sat = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto e0 = random_two_qubit_channel(900 + 2 * t);
        const auto e1 = random_two_qubit_channel(901 + 2 * t);
        const Vec psi = haar_random_ket(8, 950 + t);
        auto plain = ParamCircuit::discrete({2, 2, 2, 2});
        plain.add_fixed(Mat::Identity(16, 16), {0, 1, 2, 3});
        const auto outs = HypothesisProblem::fixed_probe({e0, e1}, {0, 1}, {2, 2, 2}, psi, plain).channel_outputs(RVec());
        auto meas = ParamCircuit::discrete({2, 2, 2, 2});
        meas.add_fixed(naimark_unitary(helstrom(outs[0], outs[1]).projector), {0, 1, 2, 3});
        const auto prob = HypothesisProblem::fixed_probe({e0, e1}, {0, 1}, {2, 2, 2}, psi, meas);
        worst_sat = std::max(worst_sat, std::abs(signed_tve(prob, RVec(), RVec()) - trace_distance(outs[0], outs[1])));
    }

    detail(fmt("qubit:   max(T^ve - T) = %.3e over 100 triples", worst_qubit));
    detail(fmt("bosonic: max(T^ve - T) = %.3e over 100 triples", worst_bosonic));
    detail(fmt("Helstrom-fed Naimark: max |T^ve - T| = %.3e over 20 cases", worst_sat));
    v.pass = worst_qubit <= pinned::c6_slack && worst_bosonic <= pinned::c6_slack && worst_sat <= pinned::c6_slack;
    v.summary = fmt("bound holds within %.0e, saturation within %.0e", pinned::c6_slack, pinned::c6_slack);
    return v;
}

Verdict multi_hypothesis()
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    std::vector<KrausChannel> ch;
    for (int i = 0; i < 3; ++i) ch.push_back(KrausChannel::unitary({2, 2}, haar_random_unitary(4, 2024 + i)));
    Vec ghz = Vec::Zero(16);
    ghz(0) = ghz(15) = 1.0 / std::sqrt(2.0);
    const std::vector<int> probe_dims{2, 2, 2, 2};
    const std::vector<int> meas_dims{3, 2, 2, 2, 2};

    const auto base = HypothesisProblem::fixed_probe(ch, {0, 1}, probe_dims, ghz,
                                                     build_hardware_efficient_ansatz(meas_dims, 1));
    const double opt = povm_fixed_point(base.channel_outputs(RVec()), 5000, 1e-14).success;
    detail(fmt("POVM optimum on the GHZ probe: %.6f", opt));

    double success[2] = {0.0, 0.0};
    const int layer_counts[2] = {5, 7};
    for (int i = 0; i < 2; ++i) {
        const auto prob = HypothesisProblem::fixed_probe(ch, {0, 1}, probe_dims, ghz,
                                                         build_hardware_efficient_ansatz(meas_dims, layer_counts[i]));
        success[i] = run_vqht(prob, gradient_config(8), 707).cost;
        const double gap = opt - success[i];
        const bool ok = gap <= pinned::c7_gap;
        v.pass = v.pass && ok;
        detail(fmt("%d layers: success %.6f  gap %.2f pp  %s", layer_counts[i], success[i], 100 * gap,
                   ok ? "ok" : "MISS"));
    }
    const bool monotone = success[1] >= success[0] - pinned::c7_layer_slack;
    v.pass = v.pass && monotone;
    detail(fmt("7-layer minus 5-layer: %+.2f pp  %s", 100 * (success[1] - success[0]), monotone ? "ok" : "MISS"));
    v.summary = fmt("gaps %.2f / %.2f pp (limit %.0f pp), %.1f s", 100 * (opt - success[0]), 100 * (opt - success[1]),
                    100 * pinned::c7_gap, seconds_since(t0));
    return v;
}

Verdict noise(const std::vector<IlluminationRun>& runs)
{
    Verdict v;
    const IlluminationRun* run = nullptr;
    for (const auto& r : runs) {
        if (r.n_b == 1.0) run = &r;
    }
    if (!run) return {false, "no optimized N_B = 1 result"};
    const auto rows = noise_robustness(run->result, run->problem, {0.0, 1e-4, 1e-3, 1e-2}, 200, 808);
    v.pass = rows[0].ratio == 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        detail(fmt("variance %.0e  ratio %.6f", rows[i].variance, rows[i].ratio));
        if (i > 0) v.pass = v.pass && rows[i].ratio <= rows[i - 1].ratio + pinned::c8_slack;
    }
    v.summary = fmt("ratio 1 at zero variance, non-increasing within %.0f%% slack", 100 * pinned::c8_slack);
    return v;
}

Verdict neighborhood()
{
    Verdict v;
    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const auto probe = DensityMatrix::from_ket({2, 2}, bell);
    const int targets[] = {0};
    for (double eps : {1e-3, 1e-2}) {
        const auto r = epsilon_neighborhood_check(KrausChannel::identity({2}), KrausChannel::unitary({2}, pauli_z()),
                                                  probe, targets, eps, 50, 909);
        v.pass = v.pass && r.pass;
        detail(fmt("eps=%.0e  d=%.6f  observed [%.6f, %.6f]  allowed [%.6f, %.6f]  violations %zu", eps, r.d,
                   r.min_distance, r.max_distance, r.d * (1 - 2 * eps), r.d, r.violating_trials.size()));
    }
    v.summary = "50 perturbed probes per eps inside [d(1-2eps), d]";
    return v;
}

Verdict simulator_crosscheck()
{
    Verdict v;
    std::mt19937_64 rng(2024);
    double worst = 0.0, leak = 0.0;
    for (int c = 0; c < 25; ++c) {
        const auto r = testing::fock_vs_gaussian(testing::random_gaussian_circuit(rng, c), 20);
        worst = std::max(worst, r.max_error);
        leak = std::max(leak, r.leakage);
    }
    double worst_vac = 0.0;
    for (double nb : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
        const auto th = thermal_state(nb, 20);
        worst_vac = std::max(worst_vac, std::abs(vacuum_probability(th, 0) - 1.0 / (1.0 + nb)));
    }
    detail(fmt("25 circuits: max moment error %.2e, max leakage %.2e", worst, leak));
    detail(fmt("thermal vacuum probability: max error %.2e for N_B <= 2", worst_vac));
    v.pass = worst <= pinned::c10_moments && worst_vac <= pinned::c10_vacuum;
    v.summary = fmt("moments within %.0e, vacuum probability within %.0e", pinned::c10_moments, pinned::c10_vacuum);
    return v;
}

}  // namespace

int main()
{
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    std::vector<IlluminationRun> runs;
    struct Criterion {
        int id;
        const char* name;
        std::function<Verdict()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "phase-flip diamond estimation", phase_flip_diamond},
        {2, "unitary diamond estimation", unitary_diamond},
        {3, "illumination optimality", [&] { return illumination(runs); }},
        {4, "TMSV reference values", tmsv_reference},
        {5, "red-square witness", [&] { return red_square(runs); }},
        {6, "T^ve upper bound", tve_upper_bound},
        {7, "multi-hypothesis", multi_hypothesis},
        {8, "noise robustness", [&] { return noise(runs); }},
        {9, "epsilon neighborhood", neighborhood},
        {10, "simulator cross-check", simulator_crosscheck},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s  criterion %d  %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.summary.c_str());
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
