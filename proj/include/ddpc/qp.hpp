#pragma once

// Self-contained convex QP solver: quadratic cost, linear equalities and
// two-sided linear inequalities. Equality-constrained problems are solved
// directly through the KKT system; inequality-constrained ones through an
// over-relaxed operator-splitting iteration with diagonal preconditioning
// and an active-set polish step.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddpc/hankel.hpp"

namespace ddpc::qp {

/// Magnitude treated as an infinite bound.
inline constexpr double kInfinity = 1e30;

struct QpProblem {
    Matrix h;     // symmetric PSD cost
    Vector f;     // linear cost
    Matrix a_eq;  // equality rows (may be 0 x n)
    Vector b_eq;
    Matrix a_in;  // inequality rows, lb <= a_in x <= ub (may be 0 x n)
    Vector lb, ub;

    Eigen::Index n_vars() const { return h.rows(); }

    void validate() const {
        const Eigen::Index n = h.rows();
        if (h.cols() != n) throw ShapeError("QpProblem: H must be square");
        if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + h.cwiseAbs().maxCoeff()))
            throw ShapeError("QpProblem: H must be symmetric");
        if (f.size() != n) throw ShapeError("QpProblem: f length mismatch");
        if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != n))
            throw ShapeError("QpProblem: equality block dimensions inconsistent");
        if (a_in.rows() != lb.size() || a_in.rows() != ub.size() ||
            (a_in.rows() > 0 && a_in.cols() != n))
            throw ShapeError("QpProblem: inequality block dimensions inconsistent");
        for (Eigen::Index i = 0; i < lb.size(); ++i) {
            if (lb(i) > ub(i)) throw ShapeError("QpProblem: lb > ub at row " + std::to_string(i));
        }
    }
};

enum class QpStatus { optimal, infeasible, max_iterations };

inline const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::optimal: return "optimal";
        case QpStatus::infeasible: return "infeasible";
        default: return "max-iterations";
    }
}

struct QpSolution {
    Vector x;
    Vector y;  // multipliers for the stacked [a_eq; a_in] rows
    double objective = 0.0;
    QpStatus status = QpStatus::max_iterations;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
};

/// Dense matrices and dimensions in a plain text form, for cross-checking
/// against external solvers.
inline void dump(const QpProblem& p, std::ostream& os) {
    const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "\n");
    os << "n_vars " << p.n_vars() << "\nn_eq " << p.a_eq.rows() << "\nn_in " << p.a_in.rows()
       << "\nH\n" << p.h.format(fmt) << "\nf\n" << p.f.transpose().format(fmt) << "\n";
    if (p.a_eq.rows() > 0)
        os << "A_eq\n" << p.a_eq.format(fmt) << "\nb_eq\n"
           << p.b_eq.transpose().format(fmt) << "\n";
    if (p.a_in.rows() > 0)
        os << "A_in\n" << p.a_in.format(fmt) << "\nlb\n" << p.lb.transpose().format(fmt)
           << "\nub\n" << p.ub.transpose().format(fmt) << "\n";
}

namespace detail {

inline double objective_value(const QpProblem& p, const Vector& x) {
    return 0.5 * x.dot(p.h * x) + p.f.dot(x);
}

/// Direct KKT solve for problems without finite inequality bounds.
/// Falls back to a rank-revealing minimum-norm solve when the KKT matrix
/// is singular (flat directions of a PSD cost).
class EqualityCore {
public:
    EqualityCore(const Matrix& h, const Matrix& a_eq) : n_(h.rows()), me_(a_eq.rows()) {
        kkt_ = Matrix::Zero(n_ + me_, n_ + me_);
        kkt_.topLeftCorner(n_, n_) = h;
        if (me_ > 0) {
            kkt_.topRightCorner(n_, me_) = a_eq.transpose();
            kkt_.bottomLeftCorner(me_, n_) = a_eq;
        }
        lu_.compute(kkt_);
        kkt_scale_ = std::max(1.0, kkt_.cwiseAbs().maxCoeff());
    }

    QpSolution solve(const QpProblem& p, double tol) const {
        Vector rhs(n_ + me_);
        rhs.head(n_) = -p.f;
        rhs.tail(me_) = p.b_eq;

        Vector sol = lu_.solve(rhs);
        double residual = (kkt_ * sol - rhs).norm();
        if (!sol.allFinite() || residual > 1e-8 * kkt_scale_ * (1.0 + rhs.norm())) {
            if (!cod_) {
                cod_.emplace(kkt_);
                cod_->setThreshold(kRankTolerance);
            }
            sol = cod_->solve(rhs);
            residual = (kkt_ * sol - rhs).norm();
        }

        QpSolution out;
        out.x = sol.head(n_);
        out.y = sol.tail(me_);
        out.objective = objective_value(p, out.x);
        out.iterations = 1;
        out.primal_residual = me_ > 0 ? (p.a_eq * out.x - p.b_eq).lpNorm<Eigen::Infinity>() : 0.0;
        Vector dual = p.h * out.x + p.f;
        if (me_ > 0) dual += p.a_eq.transpose() * out.y;
        out.dual_residual = dual.lpNorm<Eigen::Infinity>();
        const double scale = 1.0 + p.f.lpNorm<Eigen::Infinity>() +
                             (me_ > 0 ? p.b_eq.lpNorm<Eigen::Infinity>() : 0.0);
        out.status = (residual <= std::max(tol, 1e-7) * kkt_scale_ * scale)
                         ? QpStatus::optimal
                         : QpStatus::max_iterations;
        return out;
    }

private:
    Eigen::Index n_, me_;
    Matrix kkt_;
    Eigen::PartialPivLU<Matrix> lu_;
    mutable std::optional<Eigen::CompleteOrthogonalDecomposition<Matrix>> cod_;
    double kkt_scale_ = 1.0;
};

/// Over-relaxed ADMM in OSQP form: min 1/2 x'Px + q'x s.t. l <= Ax <= u,
/// with Ruiz equilibration and constant per-row step sizes (larger on
/// equality rows).
class AdmmCore {
public:
    AdmmCore(const Matrix& h, const Matrix& a, const Vector& l, const Vector& u)
        : n_(h.rows()), m_(a.rows()) {
        // Ruiz equilibration of [P A'; A 0].
        d_ = Vector::Ones(n_);
        e_ = Vector::Ones(m_);
        Matrix p_s = h;
        Matrix a_s = a;
        for (int it = 0; it < 10; ++it) {
            Vector col_norm(n_);
            for (Eigen::Index j = 0; j < n_; ++j) {
                double v = p_s.col(j).cwiseAbs().maxCoeff();
                if (m_ > 0) v = std::max(v, a_s.col(j).cwiseAbs().maxCoeff());
                col_norm(j) = v;
            }
            Vector row_norm(m_);
            for (Eigen::Index i = 0; i < m_; ++i)
                row_norm(i) = a_s.row(i).cwiseAbs().maxCoeff();

            Vector dd = col_norm.unaryExpr(
                [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
            Vector ee = row_norm.unaryExpr(
                [](double v) { return v > 1e-12 ? 1.0 / std::sqrt(v) : 1.0; });
            p_s = dd.asDiagonal() * p_s * dd.asDiagonal();
            if (m_ > 0) a_s = ee.asDiagonal() * a_s * dd.asDiagonal();
            d_ = d_.cwiseProduct(dd);
            e_ = e_.cwiseProduct(ee);
        }
        p_scaled_ = p_s;
        a_scaled_ = a_s;

        rho_ = Vector::Constant(m_, rho_bar_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (l(i) == u(i)) rho_(i) = 1e3 * rho_bar_;
        }
        factorize();
    }

    QpSolution solve(const QpProblem& p, const Matrix& a, const Vector& l, const Vector& u,
                     double tol, int max_iter) {
        // Scale the data that changes between calls.
        Vector q_s = d_.cwiseProduct(p.f);
        const double cost_scale =
            1.0 / std::max(1.0, q_s.lpNorm<Eigen::Infinity>());
        q_s *= cost_scale;
        Vector l_s(m_), u_s(m_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            l_s(i) = l(i) <= -kInfinity ? -kInfinity : e_(i) * l(i);
            u_s(i) = u(i) >= kInfinity ? kInfinity : e_(i) * u(i);
        }
        const Matrix p_cost = cost_scale * p_scaled_;

        Vector x = Vector::Zero(n_);
        Vector z = Vector::Zero(m_);
        Vector y = Vector::Zero(m_);
        Vector y_prev = y;

        QpSolution out;
        out.status = QpStatus::max_iterations;
        const double alpha = 1.6;

        // The cost scaling multiplies P as well, so refactor with it.
        factorize(cost_scale);

        int iter = 0;
        for (; iter < max_iter; ++iter) {
            Vector rhs(n_ + m_);
            rhs.head(n_) = sigma_ * x - q_s;
            rhs.tail(m_) = z - y.cwiseQuotient(rho_);
            const Vector sol = lu_.solve(rhs);
            const Vector x_tilde = sol.head(n_);
            const Vector nu = sol.tail(m_);
            const Vector z_tilde = z + (nu - y).cwiseQuotient(rho_);

            x = alpha * x_tilde + (1.0 - alpha) * x;
            const Vector z_relax = alpha * z_tilde + (1.0 - alpha) * z;
            const Vector z_new =
                (z_relax + y.cwiseQuotient(rho_)).cwiseMax(l_s).cwiseMin(u_s);
            y_prev = y;
            y = y + rho_.cwiseProduct(z_relax - z_new);
            z = z_new;

            if (iter % 10 != 9) continue;

            // Unscaled iterates and residuals.
            const Vector x_u = d_.cwiseProduct(x);
            const Vector z_u = z.cwiseQuotient(e_);
            const Vector y_u = e_.cwiseProduct(y) / cost_scale;
            const Vector ax = a.rows() > 0 ? Vector(a * x_u) : Vector::Zero(0);
            const double r_prim =
                m_ > 0 ? (ax - z_u).lpNorm<Eigen::Infinity>() : 0.0;
            Vector dual = p.h * x_u + p.f;
            if (m_ > 0) dual += a.transpose() * y_u;
            const double r_dual = dual.lpNorm<Eigen::Infinity>();

            const double eps_prim =
                tol + tol * std::max(m_ > 0 ? ax.lpNorm<Eigen::Infinity>() : 0.0,
                                     m_ > 0 ? z_u.lpNorm<Eigen::Infinity>() : 0.0);
            const double eps_dual =
                tol + tol * std::max({(p.h * x_u).lpNorm<Eigen::Infinity>(),
                                      m_ > 0 ? (a.transpose() * y_u).lpNorm<Eigen::Infinity>()
                                             : 0.0,
                                      p.f.lpNorm<Eigen::Infinity>()});
            if (r_prim <= eps_prim && r_dual <= eps_dual) {
                out.status = QpStatus::optimal;
                out.primal_residual = r_prim;
                out.dual_residual = r_dual;
                ++iter;
                break;
            }

            // Primal infeasibility certificate from the dual increment.
            const Vector dy = e_.cwiseProduct(y - y_prev) / cost_scale;
            const double dy_norm = dy.lpNorm<Eigen::Infinity>();
            if (dy_norm > 1e-12) {
                const double cert_a =
                    (a.transpose() * dy).lpNorm<Eigen::Infinity>() / dy_norm;
                double cert_b = 0.0;
                bool bounded = true;
                for (Eigen::Index i = 0; i < m_; ++i) {
                    if (dy(i) > 0.0) {
                        if (u(i) >= kInfinity) { bounded = false; break; }
                        cert_b += u(i) * dy(i);
                    } else if (dy(i) < 0.0) {
                        if (l(i) <= -kInfinity) { bounded = false; break; }
                        cert_b += l(i) * dy(i);
                    }
                }
                if (bounded && cert_a <= 1e-10 && cert_b / dy_norm < -1e-10) {
                    out.status = QpStatus::infeasible;
                    out.primal_residual = cert_b / dy_norm;
                    out.x = d_.cwiseProduct(x);
                    out.y = dy;
                    out.iterations = iter + 1;
                    out.objective = std::numeric_limits<double>::quiet_NaN();
                    return out;
                }
            }
        }

        out.x = d_.cwiseProduct(x);
        out.y = e_.cwiseProduct(y) / cost_scale;
        out.iterations = iter;
        out.objective = objective_value(p, out.x);
        polish(p, a, l, u, tol, out);
        return out;
    }

private:
    void factorize(double cost_scale = 1.0) {
        if (cost_scale == last_cost_scale_ && factorized_) return;
        Matrix kkt = Matrix::Zero(n_ + m_, n_ + m_);
        kkt.topLeftCorner(n_, n_) =
            cost_scale * p_scaled_ + sigma_ * Matrix::Identity(n_, n_);
        if (m_ > 0) {
            kkt.topRightCorner(n_, m_) = a_scaled_.transpose();
            kkt.bottomLeftCorner(m_, n_) = a_scaled_;
            kkt.bottomRightCorner(m_, m_) = (-rho_.cwiseInverse()).asDiagonal();
        }
        lu_.compute(kkt);
        last_cost_scale_ = cost_scale;
        factorized_ = true;
    }

    /// Re-solves the KKT system restricted to the detected active set and
    /// accepts the result when it is feasible and reduces the residuals.
    void polish(const QpProblem& p, const Matrix& a, const Vector& l, const Vector& u,
                double tol, QpSolution& out) const {
        std::vector<Eigen::Index> low, up;
        const Vector ax = m_ > 0 ? Vector(a * out.x) : Vector::Zero(0);
        const double act_tol = 1e-6 * (1.0 + ax.lpNorm<Eigen::Infinity>());
        for (Eigen::Index i = 0; i < m_; ++i) {
            if (l(i) == u(i)) {
                low.push_back(i);  // equality row
            } else if (out.y(i) < -1e-12 || ax(i) <= l(i) + act_tol) {
                if (l(i) > -kInfinity && (out.y(i) < -1e-12 || ax(i) <= l(i) + act_tol))
                    low.push_back(i);
            } else if (out.y(i) > 1e-12 || ax(i) >= u(i) - act_tol) {
                if (u(i) < kInfinity) up.push_back(i);
            }
        }
        const Eigen::Index k = static_cast<Eigen::Index>(low.size() + up.size());
        Matrix a_act(k, n_);
        Vector b_act(k);
        Eigen::Index r = 0;
        for (const auto i : low) {
            a_act.row(r) = a.row(i);
            b_act(r++) = (l(i) == u(i)) ? l(i) : l(i);
        }
        for (const auto i : up) {
            a_act.row(r) = a.row(i);
            b_act(r++) = u(i);
        }

        Matrix kkt = Matrix::Zero(n_ + k, n_ + k);
        kkt.topLeftCorner(n_, n_) = p.h;
        if (k > 0) {
            kkt.topRightCorner(n_, k) = a_act.transpose();
            kkt.bottomLeftCorner(k, n_) = a_act;
        }
        Vector rhs(n_ + k);
        rhs.head(n_) = -p.f;
        rhs.tail(k) = b_act;
        Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
        cod.setThreshold(kRankTolerance);
        const Vector sol = cod.solve(rhs);
        if (!sol.allFinite()) return;
        const Vector x_pol = sol.head(n_);

        Vector y_pol = Vector::Zero(m_);
        r = 0;
        for (const auto i : low) y_pol(i) = sol(n_ + r++);
        for (const auto i : up) y_pol(i) = sol(n_ + r++);

        const Vector ax_pol = m_ > 0 ? Vector(a * x_pol) : Vector::Zero(0);
        double prim = 0.0;
        for (Eigen::Index i = 0; i < m_; ++i) {
            prim = std::max(prim, ax_pol(i) - (u(i) >= kInfinity ? ax_pol(i) : u(i)));
            prim = std::max(prim, (l(i) <= -kInfinity ? ax_pol(i) : l(i)) - ax_pol(i));
        }
        Vector dual = p.h * x_pol + p.f;
        if (m_ > 0) dual += a.transpose() * y_pol;
        const double dual_res = dual.lpNorm<Eigen::Infinity>();
        const double feas_tol =
            std::max(tol, 1e-9) * (1.0 + ax_pol.lpNorm<Eigen::Infinity>());
        const double prev = out.primal_residual + out.dual_residual;
        if (prim <= feas_tol && (out.status != QpStatus::optimal || dual_res + prim <= prev)) {
            out.x = x_pol;
            out.y = y_pol;
            out.objective = objective_value(p, out.x);
            out.primal_residual = std::max(prim, 0.0);
            out.dual_residual = dual_res;
            if (prim <= feas_tol && dual_res <= std::max(tol, 1e-9) *
                                                    (1.0 + p.f.lpNorm<Eigen::Infinity>() +
                                                     (p.h * x_pol).lpNorm<Eigen::Infinity>()))
                out.status = QpStatus::optimal;
        }
    }

    Eigen::Index n_, m_;
    Matrix p_scaled_, a_scaled_;
    Vector d_, e_, rho_;
    double rho_bar_ = 0.1;
    double sigma_ = 1e-6;
    double last_cost_scale_ = 0.0;
    bool factorized_ = false;
    Eigen::PartialPivLU<Matrix> lu_;
};

inline bool has_finite_inequalities(const QpProblem& p) {
    for (Eigen::Index i = 0; i < p.a_in.rows(); ++i) {
        if (p.lb(i) > -kInfinity || p.ub(i) < kInfinity) return true;
    }
    return false;
}

}  // namespace detail

/// Repeated solves of problems sharing the same H / a_eq / a_in structure;
/// the factorizations are computed once and reused while f, b_eq, lb, ub
/// change between calls.
class PreparedQp {
public:
    explicit PreparedQp(QpProblem p) : problem_(std::move(p)) {
        problem_.validate();
        if (!detail::has_finite_inequalities(problem_)) {
            eq_core_.emplace(problem_.h, problem_.a_eq);
        } else {
            stack_constraints();
            admm_core_.emplace(problem_.h, a_all_, l_all_, u_all_);
        }
    }

    QpSolution solve(double tol = 1e-8, int max_iter = 50000) {
        if (eq_core_) return eq_core_->solve(problem_, tol);
        stack_bounds();
        QpSolution sol = admm_core_->solve(problem_, a_all_, l_all_, u_all_, tol, max_iter);
        return sol;
    }

    /// Update the pieces that change between receding-horizon steps.
    void update(const Vector& f, const Vector& b_eq) {
        if (f.size() != problem_.f.size() || b_eq.size() != problem_.b_eq.size())
            throw ShapeError("PreparedQp::update: dimension mismatch");
        problem_.f = f;
        problem_.b_eq = b_eq;
    }

    void update_bounds(const Vector& lb, const Vector& ub) {
        if (lb.size() != problem_.lb.size() || ub.size() != problem_.ub.size())
            throw ShapeError("PreparedQp::update_bounds: dimension mismatch");
        problem_.lb = lb;
        problem_.ub = ub;
    }

    const QpProblem& problem() const { return problem_; }

private:
    void stack_constraints() {
        const Eigen::Index me = problem_.a_eq.rows();
        const Eigen::Index mi = problem_.a_in.rows();
        a_all_.resize(me + mi, problem_.n_vars());
        if (me > 0) a_all_.topRows(me) = problem_.a_eq;
        if (mi > 0) a_all_.bottomRows(mi) = problem_.a_in;
        stack_bounds();
    }

    void stack_bounds() {
        const Eigen::Index me = problem_.a_eq.rows();
        const Eigen::Index mi = problem_.a_in.rows();
        l_all_.resize(me + mi);
        u_all_.resize(me + mi);
        l_all_.head(me) = problem_.b_eq;
        u_all_.head(me) = problem_.b_eq;
        l_all_.tail(mi) = problem_.lb;
        u_all_.tail(mi) = problem_.ub;
    }

    QpProblem problem_;
    Matrix a_all_;
    Vector l_all_, u_all_;
    std::optional<detail::EqualityCore> eq_core_;
    std::optional<detail::AdmmCore> admm_core_;
};

/// One-shot solve.
inline QpSolution solve(const QpProblem& p, double tol = 1e-8, int max_iter = 50000) {
    PreparedQp prepared(p);
    return prepared.solve(tol, max_iter);
}

/// Augments the problem with split variables s+ , s- >= 0 so that the
/// optimum of the result equals min over x of the original objective plus
/// weight * || selector x ||_1.
inline QpProblem reformulate_l1(const QpProblem& p, double weight, const Matrix& selector) {
    if (weight < 0.0) throw std::invalid_argument("reformulate_l1: weight must be >= 0");
    if (selector.cols() != p.n_vars())
        throw ShapeError("reformulate_l1: selector column count mismatch");
    const Eigen::Index n = p.n_vars();
    const Eigen::Index k = selector.rows();

    QpProblem aug;
    aug.h = Matrix::Zero(n + 2 * k, n + 2 * k);
    aug.h.topLeftCorner(n, n) = p.h;
    aug.f.resize(n + 2 * k);
    aug.f.head(n) = p.f;
    aug.f.tail(2 * k).setConstant(weight);

    const Eigen::Index me = p.a_eq.rows();
    aug.a_eq = Matrix::Zero(me + k, n + 2 * k);
    aug.b_eq.resize(me + k);
    if (me > 0) {
        aug.a_eq.topLeftCorner(me, n) = p.a_eq;
        aug.b_eq.head(me) = p.b_eq;
    }
    aug.a_eq.block(me, 0, k, n) = selector;
    aug.a_eq.block(me, n, k, k) = -Matrix::Identity(k, k);
    aug.a_eq.block(me, n + k, k, k) = Matrix::Identity(k, k);
    aug.b_eq.tail(k).setZero();

    const Eigen::Index mi = p.a_in.rows();
    aug.a_in = Matrix::Zero(mi + 2 * k, n + 2 * k);
    aug.lb.resize(mi + 2 * k);
    aug.ub.resize(mi + 2 * k);
    if (mi > 0) {
        aug.a_in.topLeftCorner(mi, n) = p.a_in;
        aug.lb.head(mi) = p.lb;
        aug.ub.head(mi) = p.ub;
    }
    aug.a_in.block(mi, n, 2 * k, 2 * k) = Matrix::Identity(2 * k, 2 * k);
    aug.lb.tail(2 * k).setZero();
    aug.ub.tail(2 * k).setConstant(kInfinity);
    return aug;
}

}  // namespace ddpc::qp
