#pragma once

// Predictive-control schemes as uniform "given the past window, return the
// input plan" steps: oracle MPC, constrained SPC, SPC with slacks,
// bounded-noise regularized DDPC, DeePC with elastic net, and the
// two-stage gamma-DDPC with its regularized variants.
//
// Every scheme condenses to a QP over its own decision vector x with
// affine input/output maps u_f = Mu x + cu and y_f = My x + cy; the QP
// matrices are assembled once per controller and the factorizations are
// reused across receding-horizon steps.

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "ddpc/plant.hpp"
#include "ddpc/predictor.hpp"
#include "ddpc/qp.hpp"

namespace ddpc {

/// Per-coordinate box; entries beyond +-qp::kInfinity mean unconstrained.
struct Box {
    Vector lower;
    Vector upper;

    static Box unbounded(Eigen::Index dim) {
        Box b;
        b.lower = Vector::Constant(dim, -qp::kInfinity);
        b.upper = Vector::Constant(dim, qp::kInfinity);
        return b;
    }

    bool is_unbounded() const {
        return (lower.array() <= -qp::kInfinity).all() && (upper.array() >= qp::kInfinity).all();
    }
};

struct ControlSpec {
    Eigen::Index horizon_T = 0;
    Eigen::Index rho = 0;
    Matrix q_weight;  // p x p, PSD
    Matrix r_weight;  // m x m, PD
    Vector y_ref;
    Vector u_ref;
    Box u_box;
    Box y_box;
    bool terminal_constraint = false;

    void validate(Eigen::Index m, Eigen::Index p) const {
        if (horizon_T < 1 || rho < 1) throw ShapeError("ControlSpec: T and rho must be >= 1");
        if (q_weight.rows() != p || q_weight.cols() != p || r_weight.rows() != m ||
            r_weight.cols() != m)
            throw ShapeError("ControlSpec: weight dimensions inconsistent");
        if (y_ref.size() != p || u_ref.size() != m)
            throw ShapeError("ControlSpec: reference dimensions inconsistent");
        if (u_box.lower.size() != m || u_box.upper.size() != m || y_box.lower.size() != p ||
            y_box.upper.size() != p)
            throw ShapeError("ControlSpec: box dimensions inconsistent");
        if (terminal_constraint && rho > horizon_T)
            throw std::invalid_argument("ControlSpec: terminal constraint needs rho <= T");
    }

    static ControlSpec regulation(Eigen::Index m, Eigen::Index p, Eigen::Index horizon,
                                  Eigen::Index rho_, double q_scale = 1.0,
                                  double r_scale = 1e-3) {
        ControlSpec spec;
        spec.horizon_T = horizon;
        spec.rho = rho_;
        spec.q_weight = q_scale * Matrix::Identity(p, p);
        spec.r_weight = r_scale * Matrix::Identity(m, m);
        spec.y_ref = Vector::Zero(p);
        spec.u_ref = Vector::Zero(m);
        spec.u_box = Box::unbounded(m);
        spec.y_box = Box::unbounded(p);
        return spec;
    }
};

struct ControlStep {
    Vector u_first;
    Vector u_plan;
    Vector y_plan;
    struct SolverStats {
        qp::QpStatus status = qp::QpStatus::optimal;
        int iterations = 0;
        double objective = 0.0;
        double primal_residual = 0.0;
        double dual_residual = 0.0;
        Eigen::Index qp_dimension = 0;
    } solver_stats;
    std::map<std::string, double> decision_extras;
};

class InfeasibleStepError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Matrix block_diag_repeat(const Matrix& w, Eigen::Index times) {
    Matrix out = Matrix::Zero(w.rows() * times, w.cols() * times);
    for (Eigen::Index i = 0; i < times; ++i)
        out.block(i * w.rows(), i * w.cols(), w.rows(), w.cols()) = w;
    return out;
}

inline Vector stack_repeat(const Vector& v, Eigen::Index times) {
    Vector out(v.size() * times);
    for (Eigen::Index i = 0; i < times; ++i) out.segment(i * v.size(), v.size()) = v;
    return out;
}

/// Shared machinery: tracking cost over affine input/output maps, box
/// rows, terminal rows, and the per-step QP refresh.
class CondensedController {
public:
    virtual ~CondensedController() = default;

protected:
    CondensedController(ControlSpec spec, Eigen::Index m, Eigen::Index p)
        : spec_(std::move(spec)), m_(m), p_(p) {
        spec_.validate(m, p);
        qbar_ = block_diag_repeat(spec_.q_weight, spec_.horizon_T);
        rbar_ = block_diag_repeat(spec_.r_weight, spec_.horizon_T);
        yr_stack_ = stack_repeat(spec_.y_ref, spec_.horizon_T);
        ur_stack_ = stack_repeat(spec_.u_ref, spec_.horizon_T);
    }

    /// Called by subclasses once Mu/My and the scheme-specific extras are
    /// known. `h_extra` holds regularization terms, `a_eq_extra` the
    /// scheme's own equality rows (right-hand sides supplied per step).
    void assemble(Matrix mu, Matrix my, const Matrix& h_extra, Matrix a_eq_extra) {
        mu_ = std::move(mu);
        my_ = std::move(my);
        const Eigen::Index n = mu_.cols();
        mu_t_rbar_ = mu_.transpose() * rbar_;
        my_t_qbar_ = my_.transpose() * qbar_;

        qp::QpProblem qp_problem;
        qp_problem.h = my_t_qbar_ * my_ + mu_t_rbar_ * mu_;
        if (h_extra.size() > 0) qp_problem.h += h_extra;
        qp_problem.h = 0.5 * (qp_problem.h + qp_problem.h.transpose());
        qp_problem.f = Vector::Zero(n);

        // Terminal rows: u(k) and y^d(k) pinned to the references over the
        // last rho steps of the horizon.
        Eigen::Index n_terminal = 0;
        if (spec_.terminal_constraint) n_terminal = (m_ + p_) * spec_.rho;
        const Eigen::Index n_scheme_eq = a_eq_extra.rows();
        qp_problem.a_eq.resize(n_scheme_eq + n_terminal, n);
        if (n_scheme_eq > 0) qp_problem.a_eq.topRows(n_scheme_eq) = a_eq_extra;
        if (spec_.terminal_constraint) {
            Eigen::Index r = n_scheme_eq;
            for (Eigen::Index k = spec_.horizon_T - spec_.rho; k < spec_.horizon_T; ++k) {
                qp_problem.a_eq.middleRows(r, m_) = mu_.middleRows(k * m_, m_);
                r += m_;
                qp_problem.a_eq.middleRows(r, p_) = my_.middleRows(k * p_, p_);
                r += p_;
            }
        }
        qp_problem.b_eq = Vector::Zero(qp_problem.a_eq.rows());
        n_scheme_eq_ = n_scheme_eq;

        // Box rows, one per coordinate with a finite bound per time step.
        box_rows_u_.clear();
        box_rows_y_.clear();
        for (Eigen::Index i = 0; i < m_; ++i)
            if (spec_.u_box.lower(i) > -qp::kInfinity || spec_.u_box.upper(i) < qp::kInfinity)
                box_rows_u_.push_back(i);
        for (Eigen::Index i = 0; i < p_; ++i)
            if (spec_.y_box.lower(i) > -qp::kInfinity || spec_.y_box.upper(i) < qp::kInfinity)
                box_rows_y_.push_back(i);
        const Eigen::Index n_in =
            spec_.horizon_T * static_cast<Eigen::Index>(box_rows_u_.size() + box_rows_y_.size());
        qp_problem.a_in.resize(n_in, n);
        qp_problem.lb.resize(n_in);
        qp_problem.ub.resize(n_in);
        Eigen::Index r = 0;
        for (Eigen::Index k = 0; k < spec_.horizon_T; ++k) {
            for (const auto i : box_rows_u_) {
                qp_problem.a_in.row(r) = mu_.row(k * m_ + i);
                qp_problem.lb(r) = spec_.u_box.lower(i);
                qp_problem.ub(r) = spec_.u_box.upper(i);
                ++r;
            }
            for (const auto i : box_rows_y_) {
                qp_problem.a_in.row(r) = my_.row(k * p_ + i);
                qp_problem.lb(r) = spec_.y_box.lower(i);
                qp_problem.ub(r) = spec_.y_box.upper(i);
                ++r;
            }
        }
        prepared_.emplace(std::move(qp_problem));
    }

    /// Refreshes the step-dependent pieces (offsets cu, cy and the
    /// scheme's equality right-hand side) and solves.
    ControlStep solve_step(const Vector& cu, const Vector& cy, const Vector& b_scheme,
                           double tol = 1e-8, int max_iter = 50000) {
        const auto& qp_problem = prepared_->problem();
        Vector f = my_t_qbar_ * (cy - yr_stack_) + mu_t_rbar_ * (cu - ur_stack_);

        Vector b_eq = Vector::Zero(qp_problem.b_eq.size());
        b_eq.head(n_scheme_eq_) = b_scheme;
        if (spec_.terminal_constraint) {
            Eigen::Index r = n_scheme_eq_;
            for (Eigen::Index k = spec_.horizon_T - spec_.rho; k < spec_.horizon_T; ++k) {
                b_eq.segment(r, m_) = spec_.u_ref - cu.segment(k * m_, m_);
                r += m_;
                b_eq.segment(r, p_) = spec_.y_ref - cy.segment(k * p_, p_);
                r += p_;
            }
        }
        prepared_->update(f, b_eq);

        if (qp_problem.a_in.rows() > 0) {
            Vector lb = qp_problem.lb;
            Vector ub = qp_problem.ub;
            Eigen::Index r = 0;
            for (Eigen::Index k = 0; k < spec_.horizon_T; ++k) {
                for (const auto i : box_rows_u_) {
                    if (spec_.u_box.lower(i) > -qp::kInfinity)
                        lb(r) = spec_.u_box.lower(i) - cu(k * m_ + i);
                    if (spec_.u_box.upper(i) < qp::kInfinity)
                        ub(r) = spec_.u_box.upper(i) - cu(k * m_ + i);
                    ++r;
                }
                for (const auto i : box_rows_y_) {
                    if (spec_.y_box.lower(i) > -qp::kInfinity)
                        lb(r) = spec_.y_box.lower(i) - cy(k * p_ + i);
                    if (spec_.y_box.upper(i) < qp::kInfinity)
                        ub(r) = spec_.y_box.upper(i) - cy(k * p_ + i);
                    ++r;
                }
            }
            prepared_->update_bounds(lb, ub);
        }

        const qp::QpSolution sol = prepared_->solve(tol, max_iter);
        if (sol.status == qp::QpStatus::infeasible)
            throw InfeasibleStepError("controller step: QP infeasible");

        ControlStep step;
        step.u_plan = mu_ * sol.x + cu;
        step.y_plan = my_ * sol.x + cy;
        step.u_first = step.u_plan.head(m_);
        step.solver_stats = {sol.status, sol.iterations, sol.objective, sol.primal_residual,
                             sol.dual_residual, qp_problem.n_vars()};
        last_x_ = sol.x;
        return step;
    }

    ControlSpec spec_;
    Eigen::Index m_, p_;
    Matrix qbar_, rbar_;
    Vector yr_stack_, ur_stack_;
    Matrix mu_, my_;
    Matrix mu_t_rbar_, my_t_qbar_;
    std::vector<Eigen::Index> box_rows_u_, box_rows_y_;
    Eigen::Index n_scheme_eq_ = 0;
    std::optional<qp::PreparedQp> prepared_;
    Vector last_x_;
};

}  // namespace detail

/// Exact-model MPC used as the comparison baseline. The prediction is
/// condensed through the extended observability matrix and the impulse-
/// response Toeplitz operator.
class OracleMpcController : public detail::CondensedController {
public:
    OracleMpcController(const LinearSystem& sys, const ControlSpec& spec)
        : CondensedController(spec, sys.m_inputs(), sys.p_outputs()) {
        const Eigen::Index T = spec_.horizon_T;
        const Eigen::Index n = sys.n_states();
        gamma_obs_.resize(p_ * T, n);
        Matrix c_ak = sys.c();
        for (Eigen::Index k = 0; k < T; ++k) {
            gamma_obs_.middleRows(k * p_, p_) = c_ak;
            c_ak = c_ak * sys.a();
        }
        Matrix h_d = Matrix::Zero(p_ * T, m_ * T);
        Matrix markov = sys.d();  // CA^{k-1}B for k >= 1, D for k = 0
        Matrix a_pow_b = sys.b();
        for (Eigen::Index k = 0; k < T; ++k) {
            for (Eigen::Index j = 0; j + k < T; ++j)
                h_d.block((j + k) * p_, j * m_, p_, m_) = markov;
            markov = sys.c() * a_pow_b;
            a_pow_b = sys.a() * a_pow_b;
        }
        assemble(Matrix::Identity(m_ * T, m_ * T), h_d, Matrix(), Matrix(0, m_ * T));
    }

    ControlStep step(const Vector& x_hat) {
        const Vector cy = gamma_obs_ * x_hat;
        return solve_step(Vector::Zero(m_ * spec_.horizon_T), cy, Vector(0));
    }

private:
    Matrix gamma_obs_;
};

/// Steady-state innovation observer built from the true plant matrices;
/// supplies the oracle MPC state in the noisy setting.
class InnovationObserver {
public:
    explicit InnovationObserver(const LinearSystem& sys, Vector x0)
        : sys_(sys), x_(std::move(x0)) {}

    const Vector& state() const { return x_; }

    void update(const Vector& u, const Vector& y) {
        const Vector innovation = y - sys_.c() * x_ - sys_.d() * u;
        x_ = sys_.a() * x_ + sys_.b() * u + sys_.k() * innovation;
    }

private:
    const LinearSystem& sys_;
    Vector x_;
};

/// Two-stage gamma scheme: gamma1 fixed by the past window, gamma2 (and
/// optionally gamma3) optimized. Covers plain gamma-DDPC, the beta- and
/// eta-regularized variants, and constrained SPC (which is the same
/// reduced problem, optionally with terminal rows).
class GammaController : public detail::CondensedController {
public:
    GammaController(const PredictorData& pd, const ControlSpec& spec, double beta = 0.0,
                    bool free_gamma3 = false, double eta = 0.0)
        : CondensedController(spec, pd.hankel.m_inputs, pd.hankel.p_outputs), pd_(pd),
          free_gamma3_(free_gamma3) {
        if (beta < 0.0 || eta < 0.0)
            throw std::invalid_argument("GammaController: penalties must be >= 0");
        const Eigen::Index n2 = pd.lq.l22.cols();
        const Eigen::Index n3 = free_gamma3 ? pd.lq.l33.cols() : 0;
        Matrix mu = Matrix::Zero(m_ * spec_.horizon_T, n2 + n3);
        mu.leftCols(n2) = pd.lq.l22;
        Matrix my(p_ * spec_.horizon_T, n2 + n3);
        my.leftCols(n2) = pd.lq.l32;
        if (free_gamma3) my.rightCols(n3) = pd.lq.l33;
        Matrix h_extra = Matrix::Zero(n2 + n3, n2 + n3);
        h_extra.topLeftCorner(n2, n2) = 2.0 * beta * Matrix::Identity(n2, n2);
        if (free_gamma3)
            h_extra.bottomRightCorner(n3, n3) = 2.0 * eta * Matrix::Identity(n3, n3);
        assemble(std::move(mu), std::move(my), h_extra, Matrix(0, n2 + n3));
    }

    ControlStep step(const InitialCondition& init) {
        const Vector gamma1 = solve_gamma1(pd_, init);
        ControlStep out = solve_step(pd_.lq.l21 * gamma1, pd_.lq.l31 * gamma1, Vector(0));
        const Eigen::Index n2 = pd_.lq.l22.cols();
        out.decision_extras["norm_gamma2"] = last_x_.head(n2).norm();
        if (free_gamma3_) out.decision_extras["norm_gamma3"] = last_x_.tail(last_x_.size() - n2).norm();
        return out;
    }

private:
    const PredictorData& pd_;
    bool free_gamma3_;
};

/// SPC with a quadratic slack on the initial-condition window.
class SlackSpcController : public detail::CondensedController {
public:
    SlackSpcController(const PredictorData& pd, const ControlSpec& spec, double lambda)
        : CondensedController(spec, pd.hankel.m_inputs, pd.hankel.p_outputs), pd_(pd) {
        if (lambda < 0.0) throw std::invalid_argument("SlackSpcController: lambda must be >= 0");
        const Eigen::Index n2 = pd.lq.l22.cols();
        const Eigen::Index ns = pd.lq.l11.rows();
        // gamma1(sigma) = L11^{-1}(z_init + sigma); W = L11^{-1}.
        const Matrix w = pd.lq.l11.triangularView<Eigen::Lower>().solve(Matrix::Identity(ns, ns));
        Matrix mu(m_ * spec_.horizon_T, n2 + ns);
        mu.leftCols(n2) = pd.lq.l22;
        mu.rightCols(ns) = pd.lq.l21 * w;
        Matrix my(p_ * spec_.horizon_T, n2 + ns);
        my.leftCols(n2) = pd.lq.l32;
        my.rightCols(ns) = pd.lq.l31 * w;
        Matrix h_extra = Matrix::Zero(n2 + ns, n2 + ns);
        h_extra.bottomRightCorner(ns, ns) = 2.0 * lambda * Matrix::Identity(ns, ns);
        assemble(std::move(mu), std::move(my), h_extra, Matrix(0, n2 + ns));
    }

    ControlStep step(const InitialCondition& init) {
        const Vector gamma1_0 =
            pd_.lq.l11.triangularView<Eigen::Lower>().solve(init.z_init);
        ControlStep out =
            solve_step(pd_.lq.l21 * gamma1_0, pd_.lq.l31 * gamma1_0, Vector(0));
        const Eigen::Index n2 = pd_.lq.l22.cols();
        out.decision_extras["norm_gamma2"] = last_x_.head(n2).norm();
        out.decision_extras["norm_sigma"] = last_x_.tail(last_x_.size() - n2).norm();
        return out;
    }

private:
    const PredictorData& pd_;
};

/// Bounded-noise regularized DDPC: optimizes over (alpha, sigma_init,
/// sigma_y) with slacks on the past and future outputs. The non-convex
/// noise-bound constraint is not enforced; the whole alpha penalty enters
/// through the single knob bar_lambda_alpha. With `sigma_y_projection`
/// the slack on future outputs is pinned to Y_F (I - Pi) alpha.
class BerberichController : public detail::CondensedController {
public:
    BerberichController(const PredictorData& pd, const ControlSpec& spec,
                        double bar_lambda_alpha, double lambda_sigma,
                        bool sigma_y_projection = false)
        : CondensedController(spec, pd.hankel.m_inputs, pd.hankel.p_outputs), pd_(pd) {
        if (bar_lambda_alpha < 0.0 || lambda_sigma < 0.0)
            throw std::invalid_argument("BerberichController: penalties must be >= 0");
        const Eigen::Index n_alpha = pd.hankel.n_cols;
        const Eigen::Index rho = spec_.rho;
        const Eigen::Index n_si = p_ * rho;
        const Eigen::Index n_sy = p_ * spec_.horizon_T;
        const Eigen::Index n = n_alpha + n_si + n_sy;
        n_alpha_ = n_alpha;

        Matrix mu = Matrix::Zero(m_ * spec_.horizon_T, n);
        mu.leftCols(n_alpha) = pd.hankel.u_future;
        Matrix my = Matrix::Zero(p_ * spec_.horizon_T, n);
        my.leftCols(n_alpha) = pd.hankel.y_future;
        my.rightCols(n_sy) = -Matrix::Identity(n_sy, n_sy);

        Matrix h_extra = Matrix::Zero(n, n);
        h_extra.topLeftCorner(n_alpha, n_alpha) =
            2.0 * bar_lambda_alpha * Matrix::Identity(n_alpha, n_alpha);
        h_extra.block(n_alpha, n_alpha, n_si + n_sy, n_si + n_sy) =
            2.0 * lambda_sigma * Matrix::Identity(n_si + n_sy, n_si + n_sy);

        // Past equation Z_P alpha - 1_y sigma_init = z_init; the selector
        // places the slack on the output entries of each past time slice.
        const Eigen::Index n_zp = pd.hankel.z_past.rows();
        Eigen::Index n_eq = n_zp + (sigma_y_projection ? n_sy : 0);
        Matrix a_eq = Matrix::Zero(n_eq, n);
        a_eq.block(0, 0, n_zp, n_alpha) = pd.hankel.z_past;
        for (Eigen::Index k = 0; k < rho; ++k) {
            for (Eigen::Index i = 0; i < p_; ++i)
                a_eq(k * (m_ + p_) + m_ + i, n_alpha + k * p_ + i) = -1.0;
        }
        if (sigma_y_projection) {
            const Matrix i_minus_pi =
                Matrix::Identity(n_alpha, n_alpha) - pd.projector();
            a_eq.block(n_zp, 0, n_sy, n_alpha) = -pd.hankel.y_future * i_minus_pi;
            a_eq.block(n_zp, n_alpha + n_si, n_sy, n_sy) = Matrix::Identity(n_sy, n_sy);
        }
        n_zp_ = n_zp;
        n_eq_scheme_ = n_eq;

        assemble(std::move(mu), std::move(my), h_extra, std::move(a_eq));
    }

    ControlStep step(const InitialCondition& init) {
        Vector b = Vector::Zero(n_eq_scheme_);
        b.head(n_zp_) = init.z_init;
        ControlStep out = solve_step(Vector::Zero(m_ * spec_.horizon_T),
                                     Vector::Zero(p_ * spec_.horizon_T), b);
        out.decision_extras["norm_alpha_1"] = last_x_.head(n_alpha_).lpNorm<1>();
        out.decision_extras["norm_sigma"] = last_x_.tail(last_x_.size() - n_alpha_).norm();
        return out;
    }

private:
    const PredictorData& pd_;
    Eigen::Index n_alpha_ = 0, n_zp_ = 0, n_eq_scheme_ = 0;
};

/// DeePC with elastic net regularization: exact data equation, l1 penalty
/// on alpha and a squared 2-norm penalty on (I - Pi) alpha.
class ElasticNetController : public detail::CondensedController {
public:
    ElasticNetController(const PredictorData& pd, const ControlSpec& spec, double lambda1,
                         double lambda2)
        : CondensedController(spec, pd.hankel.m_inputs, pd.hankel.p_outputs), pd_(pd),
          lambda1_(lambda1) {
        if (lambda1 < 0.0 || lambda2 < 0.0)
            throw std::invalid_argument("ElasticNetController: penalties must be >= 0");
        const Eigen::Index n_alpha = pd.hankel.n_cols;
        n_alpha_ = n_alpha;
        const Matrix i_minus_pi = Matrix::Identity(n_alpha, n_alpha) - pd.projector();
        Matrix h_extra = 2.0 * lambda2 * i_minus_pi;
        assemble(pd.hankel.u_future, pd.hankel.y_future, h_extra, pd.hankel.z_past);
        if (lambda1 > 0.0) {
            // Rebuild the prepared QP around the split-variable problem;
            // only the first n_alpha entries of x are the original alpha.
            qp::QpProblem base = prepared_->problem();
            prepared_.emplace(
                qp::reformulate_l1(base, lambda1, Matrix::Identity(n_alpha, n_alpha)));
        }
    }

    ControlStep step(const InitialCondition& init) {
        if (lambda1_ == 0.0) {
            ControlStep out = solve_step(Vector::Zero(m_ * spec_.horizon_T),
                                         Vector::Zero(p_ * spec_.horizon_T), init.z_init);
            out.decision_extras["norm_alpha_1"] = last_x_.lpNorm<1>();
            return out;
        }
        // l1 path: the augmented problem shares f/b structure with the
        // base one except for the extra split variables.
        const auto& aug = prepared_->problem();
        Vector f = aug.f;
        f.head(n_alpha_) = my_t_qbar_ * (-yr_stack_) + mu_t_rbar_ * (-ur_stack_);
        Vector b_eq = aug.b_eq;
        b_eq.head(init.z_init.size()) = init.z_init;
        prepared_->update(f, b_eq);
        const qp::QpSolution sol = prepared_->solve(1e-8, 50000);
        if (sol.status == qp::QpStatus::infeasible)
            throw InfeasibleStepError("elastic net step: QP infeasible");
        const Vector alpha = sol.x.head(n_alpha_);
        ControlStep out;
        out.u_plan = pd_.hankel.u_future * alpha;
        out.y_plan = pd_.hankel.y_future * alpha;
        out.u_first = out.u_plan.head(m_);
        out.solver_stats = {sol.status, sol.iterations, sol.objective, sol.primal_residual,
                            sol.dual_residual, aug.n_vars()};
        out.decision_extras["norm_alpha_1"] = alpha.lpNorm<1>();
        return out;
    }

private:
    const PredictorData& pd_;
    double lambda1_;
    Eigen::Index n_alpha_ = 0;
};

// One-shot wrappers matching the per-scheme step signatures. Long-running
// loops should hold the controller objects instead, so the factorizations
// are reused.

inline ControlStep oracle_mpc_step(const LinearSystem& sys, const ControlSpec& spec,
                                   const Vector& x_hat) {
    return OracleMpcController(sys, spec).step(x_hat);
}

inline ControlStep spc_step(const PredictorData& pd, const ControlSpec& spec,
                            const InitialCondition& init) {
    return GammaController(pd, spec).step(init);
}

inline ControlStep spc_slack_step(const PredictorData& pd, const ControlSpec& spec,
                                  const InitialCondition& init, double lambda) {
    return SlackSpcController(pd, spec, lambda).step(init);
}

inline ControlStep berberich_step(const PredictorData& pd, const ControlSpec& spec,
                                  const InitialCondition& init, double bar_lambda_alpha,
                                  double lambda_sigma, bool sigma_y_projection = false) {
    return BerberichController(pd, spec, bar_lambda_alpha, lambda_sigma, sigma_y_projection)
        .step(init);
}

inline ControlStep elastic_net_step(const PredictorData& pd, const ControlSpec& spec,
                                    const InitialCondition& init, double lambda1,
                                    double lambda2) {
    return ElasticNetController(pd, spec, lambda1, lambda2).step(init);
}

inline ControlStep gamma_ddpc_step(const PredictorData& pd, const ControlSpec& spec,
                                   const InitialCondition& init) {
    return GammaController(pd, spec).step(init);
}

inline ControlStep gamma_ddpc_beta_step(const PredictorData& pd, const ControlSpec& spec,
                                        const InitialCondition& init, double beta) {
    return GammaController(pd, spec, beta).step(init);
}

inline ControlStep gamma_three_eta_step(const PredictorData& pd, const ControlSpec& spec,
                                        const InitialCondition& init, double eta) {
    return GammaController(pd, spec, 0.0, true, eta).step(init);
}

}  // namespace ddpc
