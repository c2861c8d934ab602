#pragma once

#include <span>
#include <vector>

#include "vqht/linalg.hpp"

namespace vqht {

/// Product of local dimensions.
Eigen::Index total_dim(std::span<const int> dims);

/// Embeds an operator acting on a subset of subsystems into the full
/// row-major product space (subsystem 0 is the most significant digit).
/// The operator's own tensor factors follow the order of `targets`.
/// Target dimensions may change (Kraus maps between spaces of different size).
class LocalEmbedding {
public:
    LocalEmbedding(std::span<const int> dims, std::span<const int> targets);
    LocalEmbedding(std::span<const int> dims, std::span<const int> targets,
                   std::span<const int> out_target_dims);

    /// (op on targets) * x, where x has dim_in() rows and any number of columns.
    Mat left(const Mat& op, const Mat& x) const;

    /// op x op^dagger on the full space. Requires dim_in() == x.rows() == x.cols().
    Mat conjugate(const Mat& op, const Mat& x) const;

    Eigen::Index dim_in() const { return dim_in_; }
    Eigen::Index dim_out() const { return dim_out_; }
    Eigen::Index target_dim_in() const { return static_cast<Eigen::Index>(offs_in_.size()); }
    Eigen::Index target_dim_out() const { return static_cast<Eigen::Index>(offs_out_.size()); }
    const std::vector<int>& out_dims() const { return out_dims_; }

private:
    std::vector<int> out_dims_;
    std::vector<Eigen::Index> offs_in_, offs_out_, base_in_, base_out_;
    Eigen::Index dim_in_ = 0, dim_out_ = 0;
};

/// Reduced matrix on the `keep` subsystems (kept in ascending index order).
Mat partial_trace(const Mat& rho, std::span<const int> dims, std::span<const int> keep);

/// Digits of a row-major index.
std::vector<int> unravel_index(Eigen::Index idx, std::span<const int> dims);

}  // namespace vqht
