#pragma once

// Shared data-driven predictors: the projected output predictor, the
// projector onto the past/input row span, and the two-stage gamma solves.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "ddpc/hankel.hpp"

namespace ddpc {

/// Past window [z(t-rho) .. z(t-1)] with z(k) = [u(k); y(k)], in the same
/// row ordering as HankelSet::z_past.
struct InitialCondition {
    Vector z_init;
};

struct GammaSolution {
    Vector gamma1;
    Vector gamma2;
    std::optional<Vector> alpha_star;  // Q1^T gamma1 + Q2^T gamma2 when materialized
};

struct PredictorData {
    HankelSet hankel;
    LQFactors lq;
    Matrix y_hat_f;              // L31 Q1 + L32 Q2
    std::optional<Matrix> pi;    // N x N projector, materialized on demand

    const Matrix& projector() const {
        if (!pi) throw std::logic_error("PredictorData: projector was not materialized");
        return *pi;
    }
};

/// Builds the predictor from a HankelSet. The projected output is computed
/// both through project_rows and through the LQ identity; disagreement
/// beyond tolerance indicates a broken factorization and throws.
/// The N x N projector is materialized only when requested (the alpha-based
/// schemes need it, the gamma-based ones never form it).
inline PredictorData build_predictor(const HankelSet& h, bool materialize_pi = false) {
    PredictorData pd;
    pd.hankel = h;
    pd.lq = lq_decompose(h);
    pd.y_hat_f = pd.lq.l31 * pd.lq.q1 + pd.lq.l32 * pd.lq.q2;

    Matrix past_and_input(h.z_past.rows() + h.u_future.rows(), h.n_cols);
    past_and_input << h.z_past, h.u_future;
    const Matrix projected = project_rows(h.y_future, past_and_input);
    const double y_scale = std::max(1.0, h.y_future.norm());
    if ((projected - pd.y_hat_f).norm() > 1e-9 * y_scale) {
        throw std::runtime_error(
            "build_predictor: projection and LQ paths disagree beyond tolerance");
    }

    if (materialize_pi) {
        pd.pi = pd.lq.q1.transpose() * pd.lq.q1 + pd.lq.q2.transpose() * pd.lq.q2;
    }
    return pd;
}

namespace detail {

/// Solve L x = b for a lower-triangular block. Uses the triangular solve
/// when L is numerically nonsingular; on noise-free data the block is
/// rank deficient and the minimum-norm least-squares solution is returned
/// instead, with a residual check so inconsistent right-hand sides still
/// surface as errors.
inline Vector solve_lower_block(const Matrix& l, const Vector& b, const char* what) {
    if (l.rows() != b.size()) throw ShapeError("gamma solve: dimension mismatch");
    const double dmax = l.diagonal().cwiseAbs().maxCoeff();
    const double dmin = l.diagonal().cwiseAbs().minCoeff();
    if (dmax > 0.0 && dmin > kRankTolerance * dmax) {
        return l.triangularView<Eigen::Lower>().solve(b);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(l);
    cod.setThreshold(kRankTolerance);
    const Vector x = cod.solve(b);
    const double residual = (l * x - b).norm();
    if (residual > 1e-8 * (1.0 + b.norm())) {
        throw RankDeficiencyError(std::string(what) +
                                      ": block is singular and the right-hand side is not in "
                                      "its range (residual norm " +
                                      std::to_string(residual) + ")",
                                  cod.rank());
    }
    return x;
}

}  // namespace detail

/// gamma1* from L11 gamma1 = z_init.
inline Vector solve_gamma1(const PredictorData& pd, const InitialCondition& init) {
    if (init.z_init.size() != pd.lq.l11.rows())
        throw ShapeError("solve_gamma1: z_init length does not match (m+p)*rho");
    return detail::solve_lower_block(pd.lq.l11, init.z_init, "solve_gamma1");
}

/// gamma2 from L22 gamma2 = u_f - L21 gamma1.
inline Vector gamma2_for_input(const PredictorData& pd, const Vector& gamma1,
                               const Vector& u_f) {
    if (gamma1.size() != pd.lq.l21.cols())
        throw ShapeError("gamma2_for_input: gamma1 length mismatch");
    if (u_f.size() != pd.lq.l22.rows())
        throw ShapeError("gamma2_for_input: u_f length does not match m*T");
    return detail::solve_lower_block(pd.lq.l22, u_f - pd.lq.l21 * gamma1,
                                     "gamma2_for_input");
}

/// Predicted deterministic future output L31 gamma1 + L32 gamma2.
inline Vector predict_output(const PredictorData& pd, const Vector& gamma1,
                             const Vector& gamma2) {
    if (gamma1.size() != pd.lq.l31.cols() || gamma2.size() != pd.lq.l32.cols())
        throw ShapeError("predict_output: gamma dimension mismatch");
    return pd.lq.l31 * gamma1 + pd.lq.l32 * gamma2;
}

/// Materializes alpha* = Q1^T gamma1 + Q2^T gamma2.
inline GammaSolution make_gamma_solution(const PredictorData& pd, Vector gamma1,
                                         Vector gamma2, bool materialize_alpha = false) {
    GammaSolution sol;
    sol.gamma1 = std::move(gamma1);
    sol.gamma2 = std::move(gamma2);
    if (materialize_alpha) {
        sol.alpha_star =
            pd.lq.q1.transpose() * sol.gamma1 + pd.lq.q2.transpose() * sol.gamma2;
    }
    return sol;
}

}  // namespace ddpc
