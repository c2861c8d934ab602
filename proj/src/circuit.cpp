#include "vqht/circuit.hpp"

#include <cmath>
#include <string>

#include "vqht/errors.hpp"
#include "vqht/qsim.hpp"

namespace vqht {

ParamCircuit ParamCircuit::discrete(std::vector<int> dims)
{
    if (dims.empty()) throw UsageError("ParamCircuit: empty dims");
    for (int d : dims) {
        if (d < 2) throw UsageError("ParamCircuit: local dimension must be >= 2");
    }
    ParamCircuit c;
    c.dims_ = std::move(dims);
    return c;
}

ParamCircuit ParamCircuit::bosonic(int modes, int cutoff)
{
    if (modes < 1) throw UsageError("ParamCircuit: modes must be >= 1");
    if (cutoff < 2) throw UsageError("ParamCircuit: cutoff must be >= 2");
    ParamCircuit c;
    c.bosonic_ = true;
    c.dims_.assign(static_cast<std::size_t>(modes), cutoff);
    c.cutoff_ = cutoff;
    return c;
}

int ParamCircuit::add(GateKind kind, std::vector<int> targets, int n_slots, Mat fixed)
{
    const bool cv_kind = kind == GateKind::Displace || kind == GateKind::Squeeze2 ||
                         kind == GateKind::Split || kind == GateKind::Rotate ||
                         kind == GateKind::CPhase;
    if (cv_kind != bosonic_) throw UsageError("ParamCircuit: gate kind does not match system");
    ParamGate g{kind, std::move(targets), {}, std::move(fixed)};
    const int first = n_params_;
    for (int k = 0; k < n_slots; ++k) g.slots.push_back(n_params_++);
    if (!bosonic_) embeddings_.emplace_back(dims_, g.targets);
    gates_.push_back(std::move(g));
    return first;
}

int ParamCircuit::add_euler(int target)
{
    if (target < 0 || target >= modes() || dims_[target] != 2) {
        throw UsageError("add_euler: target must be a qubit");
    }
    return add(GateKind::Euler, {target}, 3);
}

int ParamCircuit::add_gell_mann(int target)
{
    if (target < 0 || target >= modes()) throw UsageError("add_gell_mann: target out of range");
    const int d = dims_[target];
    return add(GateKind::GellMann, {target}, d * d - 1);
}

void ParamCircuit::add_fixed(const Mat& u, std::vector<int> targets)
{
    if (unitarity_error(u) > tol::unitary) throw ValidationError("add_fixed: gate not unitary");
    add(GateKind::Fixed, std::move(targets), 0, u);
    const auto& e = embeddings_.back();
    if (u.rows() != e.target_dim_in()) throw UsageError("add_fixed: gate size mismatch");
}

int ParamCircuit::add_displacement(int mode)
{
    return add(GateKind::Displace, {mode}, 2);
}

int ParamCircuit::add_two_mode_squeeze(int a, int b)
{
    return add(GateKind::Squeeze2, {a, b}, 2);
}

int ParamCircuit::add_beam_splitter(int a, int b)
{
    return add(GateKind::Split, {a, b}, 2);
}

int ParamCircuit::add_phase_rotation(int mode)
{
    return add(GateKind::Rotate, {mode}, 1);
}

int ParamCircuit::add_controlled_phase(int a, int b)
{
    return add(GateKind::CPhase, {a, b}, 1);
}

void ParamCircuit::validate() const
{
    std::vector<bool> used(static_cast<std::size_t>(n_params_), false);
    for (const auto& g : gates_) {
        for (int s : g.slots) {
            if (s < 0 || s >= n_params_) throw UsageError("ParamCircuit: slot out of range");
            used[static_cast<std::size_t>(s)] = true;
        }
        for (int t : g.targets) {
            if (t < 0 || t >= modes()) throw UsageError("ParamCircuit: target out of range");
        }
    }
    for (std::size_t s = 0; s < used.size(); ++s) {
        if (!used[s]) throw UsageError("ParamCircuit: slot " + std::to_string(s) + " unused");
    }
}

std::vector<Mat> gell_mann_basis(int d)
{
    std::vector<Mat> out;
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            Mat s = Mat::Zero(d, d);
            s(j, k) = 1.0;
            s(k, j) = 1.0;
            out.push_back(s);
            Mat a = Mat::Zero(d, d);
            a(j, k) = -kI;
            a(k, j) = kI;
            out.push_back(a);
        }
    }
    for (int l = 1; l < d; ++l) {
        Mat z = Mat::Zero(d, d);
        const double norm = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) z(j, j) = norm;
        z(l, l) = -l * norm;
        out.push_back(z);
    }
    return out;
}

Mat ParamCircuit::gate_matrix(const ParamGate& g, const RVec& p) const
{
    switch (g.kind) {
    case GateKind::Euler: {
        auto rz = [](double a) {
            Mat m = Mat::Zero(2, 2);
            m(0, 0) = std::polar(1.0, -0.5 * a);
            m(1, 1) = std::polar(1.0, 0.5 * a);
            return m;
        };
        const double b = p(g.slots[1]);
        Mat ry(2, 2);
        ry << std::cos(0.5 * b), -std::sin(0.5 * b), std::sin(0.5 * b), std::cos(0.5 * b);
        return rz(p(g.slots[0])) * ry * rz(p(g.slots[2]));
    }
    case GateKind::GellMann: {
        const int d = dims_[g.targets[0]];
        thread_local std::vector<std::vector<Mat>> cache;
        if (static_cast<int>(cache.size()) <= d) cache.resize(static_cast<std::size_t>(d + 1));
        auto& basis = cache[static_cast<std::size_t>(d)];
        if (basis.empty()) basis = gell_mann_basis(d);
        Mat h = Mat::Zero(d, d);
        for (std::size_t k = 0; k < basis.size(); ++k) h += p(g.slots[k]) * basis[k];
        return expm(-kI * h);
    }
    case GateKind::Fixed:
        return g.fixed;
    default:
        throw UsageError("ParamCircuit: bosonic gate has no finite matrix");
    }
}

Mat ParamCircuit::apply(const RVec& params, const Mat& x) const
{
    if (bosonic_) throw UsageError("ParamCircuit::apply: bosonic circuit");
    if (params.size() != n_params_) throw UsageError("ParamCircuit: parameter count mismatch");
    Mat y = x;
    for (std::size_t k = 0; k < gates_.size(); ++k) {
        y = embeddings_[k].left(gate_matrix(gates_[k], params), y);
    }
    return y;
}

Mat ParamCircuit::unitary(const RVec& params) const
{
    const Eigen::Index n = total_dim(dims_);
    return apply(params, Mat::Identity(n, n));
}

std::vector<BosonicGate> ParamCircuit::bosonic_gates(const RVec& p) const
{
    if (!bosonic_) throw UsageError("ParamCircuit::bosonic_gates: discrete circuit");
    if (p.size() != n_params_) throw UsageError("ParamCircuit: parameter count mismatch");
    std::vector<BosonicGate> out;
    for (const auto& g : gates_) {
        const auto& s = g.slots;
        const auto& t = g.targets;
        switch (g.kind) {
        case GateKind::Displace:
            out.push_back(gate::Displacement{t[0], cplx(p(s[0]), p(s[1]))});
            break;
        case GateKind::Squeeze2:
            out.push_back(gate::TwoModeSqueeze{t[0], t[1], p(s[0]), p(s[1])});
            break;
        case GateKind::Split:
            out.push_back(gate::BeamSplitter{t[0], t[1], p(s[0]), p(s[1])});
            break;
        case GateKind::Rotate:
            out.push_back(gate::PhaseRotation{t[0], p(s[0])});
            break;
        case GateKind::CPhase:
            out.push_back(gate::ControlledPhase{t[0], t[1], p(s[0])});
            break;
        default:
            throw InternalError("ParamCircuit: discrete gate in bosonic circuit");
        }
    }
    return out;
}

ParamCircuit build_hardware_efficient_ansatz(const std::vector<int>& dims, int layers,
                                             Entangler entangler)
{
    if (layers < 1) throw UsageError("build_hardware_efficient_ansatz: layers must be >= 1");
    ParamCircuit c = ParamCircuit::discrete(dims);
    const int n = static_cast<int>(dims.size());
    std::vector<std::pair<int, int>> ring;
    for (int j = 0; j + 1 < n; ++j) ring.emplace_back(j, j + 1);
    if (n > 2) ring.emplace_back(n - 1, 0);
    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < n; ++q) {
            if (dims[q] == 2) {
                c.add_euler(q);
            } else {
                c.add_gell_mann(q);
            }
        }
        if (entangler == Entangler::CZ) {
            for (auto [a, b] : ring) c.add_fixed(gates::controlled_phase(dims[a], dims[b]), {a, b});
        }
    }
    return c;
}

ParamCircuit build_illumination_probe(int cutoff)
{
    ParamCircuit c = ParamCircuit::bosonic(2, cutoff);
    c.add_displacement(0);
    c.add_displacement(1);
    c.add_two_mode_squeeze(0, 1);
    return c;
}

ParamCircuit build_illumination_measure(int cutoff)
{
    ParamCircuit c = ParamCircuit::bosonic(3, cutoff);
    c.add_displacement(0);
    c.add_displacement(1);
    c.add_displacement(2);
    c.add_controlled_phase(0, 1);
    c.add_controlled_phase(0, 2);
    c.add_beam_splitter(0, 1);
    c.add_beam_splitter(0, 2);
    return c;
}

}  // namespace vqht
