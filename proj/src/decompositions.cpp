#include "sylkrylov/decompositions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sylkrylov/errors.hpp"

namespace sylkrylov {

QrResult thin_qr(const DenseMatrix& x) {
    if (x.rows() < x.cols()) throw DimensionError("thin_qr: requires n_rows >= n_cols");
    return compact_qr(x);
}

QrResult compact_qr(const DenseMatrix& x) {
    const index_t n = x.rows();
    const index_t s = x.cols();
    const index_t p = std::min(n, s);  // reflector count, Q width, R height

    // Factor in place: reflectors v_j stored below the diagonal of work,
    // R in the upper triangle. v_j is normalized so v_j(j) = 1.
    DenseMatrix work = x;
    std::vector<double> tau(static_cast<size_t>(p), 0.0);
    Eigen::Map<Eigen::MatrixXd> w(work.data(), n, s);
    Eigen::RowVectorXd proj;
    for (index_t j = 0; j < p; ++j) {
        const double norm = w.col(j).tail(n - j).norm();
        if (norm == 0.0) continue;  // zero column: no reflector, R(j,j) = 0
        const double alpha = w(j, j) >= 0.0 ? -norm : norm;
        const double v0 = w(j, j) - alpha;
        w(j, j) = alpha;
        const double t = -v0 / alpha;  // = 2 / (v^T v) with v scaled by v0
        tau[static_cast<size_t>(j)] = t;
        const index_t tail = n - j - 1;
        if (tail > 0) w.col(j).tail(tail) /= v0;
        // Apply I - tau v v^T to the trailing columns in one sweep.
        const index_t rest = s - j - 1;
        if (rest > 0) {
            auto v = w.col(j).tail(tail);
            proj = w.row(j).tail(rest);
            if (tail > 0) proj.noalias() += v.transpose() * w.bottomRightCorner(tail, rest);
            proj *= t;
            w.row(j).tail(rest) -= proj;
            if (tail > 0) w.bottomRightCorner(tail, rest).noalias() -= v * proj;
        }
    }

    // Accumulate the compact Q by applying reflectors to I(:, 1:p) backwards.
    DenseMatrix q(n, p);
    Eigen::Map<Eigen::MatrixXd> qm(q.data(), n, p);
    for (index_t j = 0; j < p; ++j) q(j, j) = 1.0;
    for (index_t j = p - 1; j >= 0; --j) {
        const double t = tau[static_cast<size_t>(j)];
        if (t == 0.0) continue;
        const index_t tail = n - j - 1;
        const index_t rest = p - j;
        auto v = w.col(j).tail(tail);
        proj = qm.row(j).tail(rest);
        if (tail > 0) proj.noalias() += v.transpose() * qm.bottomRightCorner(tail, rest);
        proj *= t;
        qm.row(j).tail(rest) -= proj;
        if (tail > 0) qm.bottomRightCorner(tail, rest).noalias() -= v * proj;
    }

    DenseMatrix r(p, s);
    for (index_t j = 0; j < s; ++j)
        for (index_t i = 0; i <= std::min(j, p - 1); ++i) r(i, j) = work(i, j);

    // Sign fix: make the diagonal of R nonnegative.
    for (index_t j = 0; j < p; ++j) {
        if (r(j, j) < 0.0) {
            for (index_t c = j; c < s; ++c) r(j, c) = -r(j, c);
            for (index_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
        }
    }
    return {std::move(q), std::move(r)};
}

namespace {

template <typename Solver>
SvdResult collect_svd(const Solver& dec, const DenseMatrix& x) {
    const index_t r = static_cast<index_t>(dec.singularValues().size());
    SvdResult out;
    out.u = DenseMatrix(x.rows(), r);
    out.v = DenseMatrix(x.cols(), r);
    Eigen::Map<Eigen::MatrixXd>(out.u.data(), x.rows(), r) = dec.matrixU();
    Eigen::Map<Eigen::MatrixXd>(out.v.data(), x.cols(), r) = dec.matrixV();
    out.singular_values.assign(dec.singularValues().data(), dec.singularValues().data() + r);
    return out;
}

}  // namespace

SvdResult svd(const DenseMatrix& x) {
    Eigen::Map<const Eigen::MatrixXd> m(x.data(), x.rows(), x.cols());
    if (std::min(x.rows(), x.cols()) <= 32) {
        Eigen::JacobiSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return collect_svd(dec, x);
    }
    Eigen::BDCSVD<Eigen::MatrixXd> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return collect_svd(dec, x);
}

SymmetricEigResult symmetric_eig(const DenseMatrix& x) {
    if (x.rows() != x.cols()) throw DimensionError("symmetric_eig: matrix must be square");
    Eigen::Map<const Eigen::MatrixXd> m(x.data(), x.rows(), x.cols());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> dec(m);
    if (dec.info() != Eigen::Success) throw std::runtime_error("symmetric_eig: iteration failed");
    SymmetricEigResult out;
    out.eigenvalues.assign(dec.eigenvalues().data(), dec.eigenvalues().data() + x.rows());
    out.vectors = DenseMatrix(x.rows(), x.cols());
    Eigen::Map<Eigen::MatrixXd>(out.vectors.data(), x.rows(), x.cols()) = dec.eigenvectors();
    return out;
}

}  // namespace sylkrylov
