#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SVD>

namespace thermik::dyn {

/// Singular values below rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-8;

/// Moore-Penrose pseudo-inverse via SVD with a relative rank tolerance.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
pseudo_inverse(const Eigen::MatrixBase<Derived>& x, double rank_tol = kDefaultRankTol) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (x.rows() == 0 || x.cols() == 0) return Mat::Zero(x.cols(), x.rows());
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Scalar cut = sv.size() ? Scalar(rank_tol) * sv(0) : Scalar(0);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        inv(i) = sv(i) > cut ? Scalar(1) / sv(i) : Scalar(0);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Dynamically consistent pseudo-inverse of a k x n task map X under the
/// SPD inertia A:  Xbar = A^-1 X^T (X A^-1 X^T)^+.
/// Rank deficiency in the inner term is absorbed by the pseudo-inverse.
template <class DX, class DA>
Eigen::MatrixXd dyn_consistent_pinv(const Eigen::MatrixBase<DX>& x,
                                    const Eigen::MatrixBase<DA>& a,
                                    double rank_tol = kDefaultRankTol) {
    if (x.rows() == 0) return Eigen::MatrixXd::Zero(x.cols(), 0);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    const Eigen::MatrixXd ainv_xt = llt.solve(x.transpose());
    Eigen::MatrixXd core = x * ainv_xt;
    core = 0.5 * (core + core.transpose()).eval();
    return ainv_xt * pseudo_inverse(core, rank_tol);
}

/// Orthonormal basis of the range of a projector (columns of V span
/// range(N), V^T V = I). For the contact null space N_c this range equals
/// ker(J_c), so every basis vector satisfies J_c v = 0.
template <class Derived>
Eigen::MatrixXd range_basis(const Eigen::MatrixBase<Derived>& projector,
                            double rank_tol = kDefaultRankTol) {
    if (projector.rows() == 0) return Eigen::MatrixXd(0, 0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(projector, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cut = sv.size() ? rank_tol * std::max(sv(0), 1.0) : 0.0;
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cut) ++rank;
    return svd.matrixU().leftCols(rank);
}

}  // namespace thermik::dyn
