#include "vqht/problem.hpp"

#include <cmath>

#include "vqht/errors.hpp"

namespace vqht {

namespace {

void check_discrete_layout(const std::vector<KrausChannel>& channels, const std::vector<int>& targets,
                           const std::vector<int>& probe_dims, const ParamCircuit& measure)
{
    if (channels.size() < 2) throw UsageError("HypothesisProblem: need at least 2 channels");
    std::vector<int> tdims;
    for (int t : targets) {
        if (t < 0 || t >= static_cast<int>(probe_dims.size())) {
            throw UsageError("HypothesisProblem: channel target out of range");
        }
        tdims.push_back(probe_dims[t]);
    }
    for (const auto& ch : channels) {
        if (ch.in_dims() != channels[0].in_dims()) {
            throw UsageError("HypothesisProblem: channels do not share input dims");
        }
        if (ch.in_dims() != tdims || ch.out_dims() != tdims) {
            throw UsageError("HypothesisProblem: channel dims do not match target dims");
        }
    }
    std::vector<int> want{static_cast<int>(channels.size())};
    want.insert(want.end(), probe_dims.begin(), probe_dims.end());
    if (measure.is_bosonic() || measure.dims() != want) {
        throw UsageError("HypothesisProblem: measurement circuit must act on ancilla (x) probe");
    }
}

}  // namespace

HypothesisProblem HypothesisProblem::discrete(std::vector<KrausChannel> channels,
                                              std::vector<int> channel_targets, ParamCircuit probe,
                                              ParamCircuit measure)
{
    if (probe.is_bosonic()) throw UsageError("HypothesisProblem: bosonic probe in discrete problem");
    check_discrete_layout(channels, channel_targets, probe.dims(), measure);
    probe.validate();
    measure.validate();
    HypothesisProblem p;
    p.channels_ = std::move(channels);
    p.targets_ = std::move(channel_targets);
    p.probe_dims_ = probe.dims();
    p.probe_ = std::move(probe);
    p.measure_ = std::move(measure);
    return p;
}

HypothesisProblem HypothesisProblem::fixed_probe(std::vector<KrausChannel> channels,
                                                 std::vector<int> channel_targets, std::vector<int> probe_dims,
                                                 Vec probe, ParamCircuit measure)
{
    check_discrete_layout(channels, channel_targets, probe_dims, measure);
    if (probe.size() != total_dim(probe_dims) || std::abs(probe.norm() - 1.0) > tol::trace) {
        throw UsageError("HypothesisProblem: fixed probe has wrong size or norm");
    }
    measure.validate();
    HypothesisProblem p;
    p.fixed_ = true;
    p.channels_ = std::move(channels);
    p.targets_ = std::move(channel_targets);
    p.probe_ = ParamCircuit::discrete(probe_dims);
    p.probe_dims_ = std::move(probe_dims);
    p.fixed_probe_ = std::move(probe);
    p.measure_ = std::move(measure);
    return p;
}

HypothesisProblem HypothesisProblem::bosonic(std::vector<BosonicChannelSpec> channels, ParamCircuit probe,
                                             ParamCircuit measure, std::optional<PhotonConstraint> constraint,
                                             Readout readout)
{
    if (channels.size() != 2) throw UsageError("HypothesisProblem: bosonic problems are binary");
    for (const auto& c : channels) {
        if (!(c.eta >= 0.0 && c.eta <= 1.0) || !(c.n_b >= 0.0)) {
            throw UsageError("HypothesisProblem: invalid illumination channel parameters");
        }
    }
    if (!probe.is_bosonic() || probe.modes() != 2) {
        throw UsageError("HypothesisProblem: bosonic probe must have 2 modes (signal, idler)");
    }
    if (!measure.is_bosonic() || measure.modes() != 3) {
        throw UsageError("HypothesisProblem: bosonic measurement must act on (ancilla, returned, idler)");
    }
    if (constraint && (constraint->signal_mode < 0 || constraint->signal_mode > 1 ||
                       !(constraint->target >= 0.0) || !(constraint->lambda >= 0.0))) {
        throw UsageError("HypothesisProblem: invalid photon constraint");
    }
    probe.validate();
    measure.validate();
    HypothesisProblem p;
    p.bosonic_ = true;
    p.readout_ = readout;
    p.bchannels_ = std::move(channels);
    p.probe_dims_ = probe.dims();
    p.probe_ = std::move(probe);
    p.measure_ = std::move(measure);
    p.constraint_ = constraint;
    return p;
}

Vec HypothesisProblem::probe_ket(const RVec& theta) const
{
    if (bosonic_) throw UsageError("probe_ket: bosonic problem");
    if (fixed_) return fixed_probe_;
    const Eigen::Index n = total_dim(probe_dims_);
    Mat e0 = Mat::Zero(n, 1);
    e0(0, 0) = 1.0;
    return probe_.apply(theta, e0).col(0);
}

std::vector<Mat> HypothesisProblem::channel_factors(const RVec& theta) const
{
    const Vec psi = probe_ket(theta);
    const LocalEmbedding emb(probe_dims_, targets_);
    std::vector<Mat> out;
    for (const auto& ch : channels_) {
        Mat l(psi.size(), static_cast<Eigen::Index>(ch.kraus().size()));
        for (std::size_t j = 0; j < ch.kraus().size(); ++j) {
            l.col(static_cast<Eigen::Index>(j)) = emb.left(ch.kraus()[j], psi);
        }
        out.push_back(std::move(l));
    }
    return out;
}

std::vector<Mat> HypothesisProblem::channel_outputs(const RVec& theta) const
{
    const Vec psi = probe_ket(theta);
    const Mat rho = psi * psi.adjoint();
    std::vector<Mat> out;
    for (const auto& ch : channels_) out.push_back(apply_kraus_raw(rho, probe_dims_, ch, targets_));
    return out;
}

GaussianMoments HypothesisProblem::probe_moments(const RVec& theta) const
{
    if (!bosonic_) throw UsageError("probe_moments: discrete problem");
    return gaussian_moments_from_circuit(probe_.bosonic_gates(theta), 2);
}

std::vector<GaussianMoments> HypothesisProblem::output_moments(const RVec& theta) const
{
    const GaussianMoments g = probe_moments(theta);
    std::vector<GaussianMoments> out;
    for (const auto& c : bchannels_) out.push_back(gaussian_illumination(g, c.eta, c.n_b));
    return out;
}

FockState HypothesisProblem::probe_fock(const RVec& theta, const CutoffPolicy& policy) const
{
    if (!bosonic_) throw UsageError("probe_fock: discrete problem");
    return apply_bosonic_circuit(fock_vacuum(2, probe_.cutoff()), probe_.bosonic_gates(theta), policy);
}

std::vector<FockState> HypothesisProblem::fock_outputs(const RVec& theta, const CutoffPolicy& policy) const
{
    const FockState probe = probe_fock(theta, policy);
    std::vector<FockState> out;
    for (const auto& c : bchannels_) out.push_back(illumination_channel(probe, c.eta, c.n_b, policy));
    return out;
}

std::vector<int> HypothesisProblem::energy_slots() const
{
    std::vector<int> out;
    for (const auto& g : probe_.gates()) {
        if (g.kind == GateKind::Displace) {
            out.insert(out.end(), g.slots.begin(), g.slots.end());
        } else if (g.kind == GateKind::Squeeze2) {
            out.push_back(g.slots[0]);
        }
    }
    return out;
}

std::vector<std::vector<double>> outcome_probabilities(const HypothesisProblem& problem, const RVec& theta,
                                                       const RVec& phi)
{
    if (theta.size() != problem.n_theta() || phi.size() != problem.n_phi()) {
        throw UsageError("outcome_probabilities: parameter count mismatch");
    }
    std::vector<std::vector<double>> out;
    if (problem.is_bosonic()) {
        const auto gates = problem.measure_circuit().bosonic_gates(phi);
        for (const auto& g : problem.output_moments(theta)) {
            const GaussianMoments full = apply_gaussian_circuit(gaussian_tensor(GaussianMoments::vacuum(1), g), gates);
            const double p0 = problem.readout() == Readout::Vacuum ? vacuum_overlap_gaussian(full, 0)
                                                                    : 0.5 * (1.0 + parity_gaussian(full, 0));
            out.push_back({p0, 1.0 - p0});
        }
        return out;
    }
    // Outputs of a pure probe factor as rho_i = L_i L_i^dag with columns
    // K psi, so V only has to act on a few columns.
    const auto factors = problem.channel_factors(theta);
    const Eigen::Index n = total_dim(problem.probe_dims());
    const int k = problem.k();
    Eigen::Index cols = 0;
    for (const auto& f : factors) cols += f.cols();
    Mat x = Mat::Zero(k * n, cols);
    Eigen::Index c0 = 0;
    for (const auto& f : factors) {
        x.block(0, c0, n, f.cols()) = f;
        c0 += f.cols();
    }
    const Mat y = problem.measure_circuit().apply(phi, x);
    c0 = 0;
    for (const auto& f : factors) {
        std::vector<double> p(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            p[static_cast<std::size_t>(j)] = y.block(j * n, c0, n, f.cols()).squaredNorm();
        }
        c0 += f.cols();
        out.push_back(std::move(p));
    }
    return out;
}

double signed_tve(const HypothesisProblem& problem, const RVec& theta, const RVec& phi)
{
    if (problem.k() != 2) throw UsageError("cost_tve: binary problems only");
    const auto p = outcome_probabilities(problem, theta, phi);
    return p[0][0] - p[1][0];
}

double cost_tve(const HypothesisProblem& problem, const RVec& theta, const RVec& phi)
{
    return std::abs(signed_tve(problem, theta, phi));
}

double cost_success_multi(const HypothesisProblem& problem, const RVec& theta, const RVec& phi)
{
    const auto p = outcome_probabilities(problem, theta, phi);
    const int k = problem.k();
    double acc = 0.0;
    for (int i = 0; i < k; ++i) {
        const auto& pi = p[static_cast<std::size_t>(i)];
        // Bosonic readout has two outcomes: vacuum -> hypothesis 0, else 1.
        acc += pi[static_cast<std::size_t>(std::min<int>(i, static_cast<int>(pi.size()) - 1))];
    }
    return acc / k;
}

double signal_photons(const HypothesisProblem& problem, const RVec& theta)
{
    if (!problem.is_bosonic()) throw UsageError("signal_photons: discrete problem");
    const int mode = problem.constraint() ? problem.constraint()->signal_mode : 0;
    return mean_photon_gaussian(problem.probe_moments(theta), mode);
}

double penalized_cost(const HypothesisProblem& problem, const RVec& theta, const RVec& phi)
{
    const double cost = problem.k() == 2 ? cost_tve(problem, theta, phi) : cost_success_multi(problem, theta, phi);
    if (!problem.constraint()) return cost;
    const double dn = signal_photons(problem, theta) - problem.constraint()->target;
    return cost - problem.constraint()->lambda * dn * dn;
}

}  // namespace vqht
