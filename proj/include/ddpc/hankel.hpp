#pragma once

// Dense-matrix kernels for data-driven predictive control: scaled Hankel
// construction, row-space projections, minimum-norm solves and the block
// LQ decomposition of the stacked past/future data matrix.

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ddpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value cutoff shared by every rank decision.
inline constexpr double kRankTolerance = 1e-10;

class ShapeError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& what, Eigen::Index rank)
        : std::runtime_error(what), numerical_rank(rank) {}
    Eigen::Index numerical_rank;
};

class InconsistentSystemError : public std::runtime_error {
public:
    InconsistentSystemError(const std::string& what, double residual)
        : std::runtime_error(what), residual_norm(residual) {}
    double residual_norm;
};

/// Numerical rank with singular values below kRankTolerance * s_max
/// counted as zero.
inline Eigen::Index numerical_rank(const Matrix& a) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cutoff = kRankTolerance * s(0);
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > cutoff) ++r;
    return r;
}

/// Moore-Penrose pseudo-inverse via SVD, with the shared rank cutoff.
inline Matrix pseudo_inverse(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    const double cutoff = s.size() > 0 ? kRankTolerance * s(0) : 0.0;
    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    }
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Builds the 1/sqrt(n_cols)-scaled Hankel matrix of a signal window.
/// `signal` holds one s-dimensional sample per column; column j of the
/// result stacks samples t0+j .. t1+j.
inline Matrix build_hankel(const Matrix& signal, Eigen::Index t0, Eigen::Index t1,
                           Eigen::Index n_cols) {
    if (t1 < t0) throw ShapeError("build_hankel: t1 < t0");
    if (n_cols < 1) throw ShapeError("build_hankel: n_cols must be >= 1");
    const Eigen::Index needed = t1 + n_cols;  // samples 0 .. t1 + n_cols - 1
    if (signal.cols() < needed) {
        std::ostringstream msg;
        msg << "build_hankel: signal too short, sample index " << needed - 1
            << " required but only " << signal.cols() << " samples available";
        throw std::out_of_range(msg.str());
    }
    const Eigen::Index s = signal.rows();
    const Eigen::Index block_rows = t1 - t0 + 1;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_cols));
    Matrix h(s * block_rows, n_cols);
    for (Eigen::Index i = 0; i < block_rows; ++i) {
        for (Eigen::Index j = 0; j < n_cols; ++j) {
            h.block(i * s, j, s, 1) = scale * signal.col(t0 + i + j);
        }
    }
    return h;
}

/// Stacked past/future Hankel matrices of a joint input/output record.
struct HankelSet {
    Matrix z_past;    // (m+p)*rho x N, z(k) = [u(k); y(k)] interleaved per step
    Matrix u_future;  // m*T x N
    Matrix y_future;  // p*T x N
    Eigen::Index rho = 0;
    Eigen::Index horizon_T = 0;
    Eigen::Index n_cols = 0;
    Eigen::Index m_inputs = 0;
    Eigen::Index p_outputs = 0;

    Matrix stacked() const {
        Matrix z(z_past.rows() + u_future.rows() + y_future.rows(), n_cols);
        z << z_past, u_future, y_future;
        return z;
    }
};

/// Builds the HankelSet from input samples `u` (m x N_data) and output
/// samples `y` (p x N_data), exploiting all the data: N = N_data - T - rho.
inline HankelSet build_hankel_set(const Matrix& u, const Matrix& y, Eigen::Index rho,
                                  Eigen::Index horizon_T) {
    if (u.cols() != y.cols()) throw ShapeError("build_hankel_set: u and y lengths differ");
    const Eigen::Index m = u.rows();
    const Eigen::Index p = y.rows();
    const Eigen::Index n_data = u.cols();
    const Eigen::Index min_n_data = horizon_T + rho + (m + p) * (rho + horizon_T);
    if (n_data <= horizon_T + rho) {
        std::ostringstream msg;
        msg << "build_hankel_set: N_data = " << n_data << " too short; need at least "
            << min_n_data + 1 << " samples for a full-rank data matrix (and > "
            << horizon_T + rho << " for any columns at all)";
        throw std::invalid_argument(msg.str());
    }
    const Eigen::Index n = n_data - horizon_T - rho;

    Matrix z(m + p, n_data);
    z.topRows(m) = u;
    z.bottomRows(p) = y;

    HankelSet h;
    h.z_past = build_hankel(z, 0, rho - 1, n);
    h.u_future = build_hankel(u, rho, rho + horizon_T - 1, n);
    h.y_future = build_hankel(y, rho, rho + horizon_T - 1, n);
    h.rho = rho;
    h.horizon_T = horizon_T;
    h.n_cols = n;
    h.m_inputs = m;
    h.p_outputs = p;
    return h;
}

/// Orthogonal projection of the rows of `b` onto the row span of `onto`:
/// B A^T (A A^T)^+ A. Idempotent within tolerance.
inline Matrix project_rows(const Matrix& b, const Matrix& onto) {
    if (b.cols() != onto.cols()) {
        throw ShapeError("project_rows: column counts differ");
    }
    const Matrix gram = onto * onto.transpose();
    return b * onto.transpose() * pseudo_inverse(gram) * onto;
}

/// Block factors of the LQ decomposition [Z_P; U_F; Y_F] = L Q with L
/// block lower triangular and Q_i having orthonormal rows.
struct LQFactors {
    Matrix l11, l21, l22, l31, l32, l33;
    Matrix q1, q2, q3;
    Eigen::Index rank = 0;  // numerical rank of the stacked data matrix

    Matrix l() const {
        const Eigen::Index r1 = l11.rows(), r2 = l22.rows(), r3 = l33.rows();
        Matrix l = Matrix::Zero(r1 + r2 + r3, r1 + r2 + r3);
        l.block(0, 0, r1, r1) = l11;
        l.block(r1, 0, r2, r1) = l21;
        l.block(r1, r1, r2, r2) = l22;
        l.block(r1 + r2, 0, r3, r1) = l31;
        l.block(r1 + r2, r1, r3, r2) = l32;
        l.block(r1 + r2, r1 + r2, r3, r3) = l33;
        return l;
    }

    Matrix q() const {
        Matrix q(q1.rows() + q2.rows() + q3.rows(), q1.cols());
        q << q1, q2, q3;
        return q;
    }
};

/// LQ decomposition via QR of the transposed stacked matrix. Diagonal
/// entries of L are forced nonnegative so the factors are deterministic.
/// With `require_full_rank` the numerical rank of the stacked matrix is
/// checked against the Lemma-3 full-rank condition and a
/// RankDeficiencyError is thrown on failure; otherwise the rank is only
/// reported in the result (noise-free data is legitimately deficient).
inline LQFactors lq_decompose(const HankelSet& h, bool require_full_rank = false) {
    const Matrix z = h.stacked();
    const Eigen::Index rows = z.rows();
    if (h.n_cols < rows) {
        throw std::invalid_argument("lq_decompose: need N >= (m+p)(rho+T) columns");
    }

    Eigen::HouseholderQR<Matrix> qr(z.transpose());
    Matrix thin_q = qr.householderQ() * Matrix::Identity(h.n_cols, rows);
    Matrix r = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
    Matrix l = r.transpose();
    Matrix q = thin_q.transpose();

    // Sign convention: nonnegative diagonal of L.
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (l(i, i) < 0.0) {
            l.col(i) = -l.col(i);
            q.row(i) = -q.row(i);
        }
    }

    LQFactors f;
    f.rank = numerical_rank(z);
    if (require_full_rank && f.rank < rows) {
        throw RankDeficiencyError(
            "lq_decompose: stacked data matrix is rank deficient (numerical rank " +
                std::to_string(f.rank) + " < " + std::to_string(rows) +
                "); data may be noise-free or insufficiently exciting",
            f.rank);
    }

    const Eigen::Index r1 = h.z_past.rows();
    const Eigen::Index r2 = h.u_future.rows();
    const Eigen::Index r3 = h.y_future.rows();
    f.l11 = l.block(0, 0, r1, r1);
    f.l21 = l.block(r1, 0, r2, r1);
    f.l22 = l.block(r1, r1, r2, r2);
    f.l31 = l.block(r1 + r2, 0, r3, r1);
    f.l32 = l.block(r1 + r2, r1, r3, r2);
    f.l33 = l.block(r1 + r2, r1 + r2, r3, r3);
    f.q1 = q.topRows(r1);
    f.q2 = q.middleRows(r1, r2);
    f.q3 = q.bottomRows(r3);
    return f;
}

/// Minimum-norm solution of a consistent linear system A x = b.
/// Throws InconsistentSystemError when the residual is too large.
inline Vector min_norm_solve(const Matrix& a, const Vector& b, double tol = 1e-8) {
    if (a.rows() != b.size()) throw ShapeError("min_norm_solve: dimension mismatch");
    const Vector x = pseudo_inverse(a) * b;
    const double residual = (a * x - b).norm();
    if (residual > tol * (1.0 + b.norm())) {
        throw InconsistentSystemError(
            "min_norm_solve: system inconsistent, residual norm " + std::to_string(residual),
            residual);
    }
    return x;
}

}  // namespace ddpc
