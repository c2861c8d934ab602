#include "vqht/subsystems.hpp"

#include <algorithm>
#include <string>

#include "vqht/errors.hpp"

namespace vqht {

namespace {

std::vector<Eigen::Index> strides_of(std::span<const int> dims)
{
    std::vector<Eigen::Index> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        s[k - 1] = s[k] * dims[k];
    }
    return s;
}

// Offsets of every configuration of `which` subsystems, enumerated row-major
// in the order given.
std::vector<Eigen::Index> offsets(std::span<const int> dims, std::span<const Eigen::Index> strides,
                                  std::span<const int> which)
{
    std::vector<Eigen::Index> out{0};
    for (int w : which) {
        std::vector<Eigen::Index> next;
        next.reserve(out.size() * dims[w]);
        for (Eigen::Index o : out) {
            for (int d = 0; d < dims[w]; ++d) next.push_back(o + d * strides[w]);
        }
        out = std::move(next);
    }
    return out;
}

void check_targets(std::span<const int> dims, std::span<const int> targets)
{
    if (targets.empty()) throw UsageError("LocalEmbedding: empty target list");
    std::vector<int> seen;
    for (int t : targets) {
        if (t < 0 || t >= static_cast<int>(dims.size())) {
            throw UsageError("LocalEmbedding: target " + std::to_string(t) + " out of range");
        }
        if (std::find(seen.begin(), seen.end(), t) != seen.end()) {
            throw UsageError("LocalEmbedding: duplicate target " + std::to_string(t));
        }
        seen.push_back(t);
    }
}

}  // namespace

Eigen::Index total_dim(std::span<const int> dims)
{
    Eigen::Index n = 1;
    for (int d : dims) n *= d;
    return n;
}

std::vector<int> unravel_index(Eigen::Index idx, std::span<const int> dims)
{
    std::vector<int> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = static_cast<int>(idx % dims[k]);
        idx /= dims[k];
    }
    return digits;
}

LocalEmbedding::LocalEmbedding(std::span<const int> dims, std::span<const int> targets)
{
    std::vector<int> same;
    for (int t : targets) {
        if (t < 0 || t >= static_cast<int>(dims.size())) {
            throw UsageError("LocalEmbedding: target " + std::to_string(t) + " out of range");
        }
        same.push_back(dims[t]);
    }
    *this = LocalEmbedding(dims, targets, same);
}

LocalEmbedding::LocalEmbedding(std::span<const int> dims, std::span<const int> targets,
                               std::span<const int> out_target_dims)
{
    check_targets(dims, targets);
    if (out_target_dims.size() != targets.size()) {
        throw UsageError("LocalEmbedding: output target dims do not match target count");
    }
    out_dims_.assign(dims.begin(), dims.end());
    for (std::size_t k = 0; k < targets.size(); ++k) out_dims_[targets[k]] = out_target_dims[k];

    std::vector<int> rest;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        if (std::find(targets.begin(), targets.end(), k) == targets.end()) rest.push_back(k);
    }
    const auto s_in = strides_of(dims);
    const auto s_out = strides_of(out_dims_);
    offs_in_ = offsets(dims, s_in, targets);
    offs_out_ = offsets(out_dims_, s_out, targets);
    base_in_ = offsets(dims, s_in, rest);
    base_out_ = offsets(out_dims_, s_out, rest);
    dim_in_ = total_dim(dims);
    dim_out_ = total_dim(out_dims_);
}

Mat LocalEmbedding::left(const Mat& op, const Mat& x) const
{
    const Eigen::Index tin = target_dim_in(), tout = target_dim_out();
    if (op.rows() != tout || op.cols() != tin) {
        throw UsageError("LocalEmbedding: operator shape does not match target dimensions");
    }
    if (x.rows() != dim_in_) throw UsageError("LocalEmbedding: operand row count mismatch");
    const Eigen::Index nrest = static_cast<Eigen::Index>(base_in_.size());
    const Eigen::Index ncols = x.cols();

    Mat gathered(tin, nrest * ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        for (Eigen::Index r = 0; r < nrest; ++r) {
            const Eigen::Index base = base_in_[r];
            auto col = gathered.col(r + nrest * c);
            for (Eigen::Index t = 0; t < tin; ++t) col(t) = x(base + offs_in_[t], c);
        }
    }
    const Mat mapped = op * gathered;
    Mat y(dim_out_, ncols);
    for (Eigen::Index c = 0; c < ncols; ++c) {
        for (Eigen::Index r = 0; r < nrest; ++r) {
            const Eigen::Index base = base_out_[r];
            const auto col = mapped.col(r + nrest * c);
            for (Eigen::Index t = 0; t < tout; ++t) y(base + offs_out_[t], c) = col(t);
        }
    }
    return y;
}

Mat LocalEmbedding::conjugate(const Mat& op, const Mat& x) const
{
    // op x op^dag = (op (op x)^dag)^dag
    const Mat half = left(op, x);
    return left(op, half.adjoint()).adjoint();
}

Mat partial_trace(const Mat& rho, std::span<const int> dims, std::span<const int> keep)
{
    if (keep.empty()) throw UsageError("partial_trace: empty keep set");
    std::vector<int> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
        throw UsageError("partial_trace: duplicate subsystem in keep set");
    }
    for (int k : kept) {
        if (k < 0 || k >= static_cast<int>(dims.size())) {
            throw UsageError("partial_trace: subsystem " + std::to_string(k) + " out of range");
        }
    }
    if (rho.rows() != total_dim(dims) || rho.cols() != rho.rows()) {
        throw UsageError("partial_trace: matrix shape does not match dims");
    }
    std::vector<int> traced;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k) {
        if (!std::binary_search(kept.begin(), kept.end(), k)) traced.push_back(k);
    }
    const auto s = strides_of(dims);
    const auto keep_off = offsets(dims, s, kept);
    const auto tr_off = offsets(dims, s, traced);
    const Eigen::Index nk = static_cast<Eigen::Index>(keep_off.size());
    Mat out = Mat::Zero(nk, nk);
    for (Eigen::Index b = 0; b < nk; ++b) {
        for (Eigen::Index a = 0; a < nk; ++a) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index t : tr_off) acc += rho(keep_off[a] + t, keep_off[b] + t);
            out(a, b) = acc;
        }
    }
    return out;
}

}  // namespace vqht
