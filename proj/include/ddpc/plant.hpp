#pragma once

// Innovation-form LTI plant simulation: training-data generation, the
// closed-loop test environment, and the benchmark system used throughout
// the experiments.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "ddpc/hankel.hpp"
#include "ddpc/rng.hpp"

namespace ddpc {

/// x(t+1) = A x(t) + B u(t) + K e(t),  y(t) = C x(t) + D u(t) + e(t).
/// Minimality and strict stability of A - K C are checked at construction.
class LinearSystem {
public:
    LinearSystem(Matrix a, Matrix b, Matrix c, Matrix d, Matrix k)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)),
          k_(std::move(k)) {
        const Eigen::Index n = a_.rows();
        if (a_.cols() != n) throw ShapeError("LinearSystem: A must be square");
        if (b_.rows() != n || c_.cols() != n || k_.rows() != n)
            throw ShapeError("LinearSystem: B/C/K dimensions inconsistent with A");
        if (d_.rows() != c_.rows() || d_.cols() != b_.cols() || k_.cols() != c_.rows())
            throw ShapeError("LinearSystem: D/K dimensions inconsistent with B, C");

        if (!full_rank_krylov(a_, b_))
            throw std::invalid_argument("LinearSystem: (A, B) not reachable");
        if (!full_rank_krylov(a_.transpose(), c_.transpose()))
            throw std::invalid_argument("LinearSystem: (A, C) not observable");

        lambda_max_ = spectral_radius(a_ - k_ * c_);
        if (lambda_max_ >= 1.0)
            throw std::invalid_argument("LinearSystem: A - K C is not strictly stable");
    }

    const Matrix& a() const { return a_; }
    const Matrix& b() const { return b_; }
    const Matrix& c() const { return c_; }
    const Matrix& d() const { return d_; }
    const Matrix& k() const { return k_; }
    Eigen::Index n_states() const { return a_.rows(); }
    Eigen::Index m_inputs() const { return b_.cols(); }
    Eigen::Index p_outputs() const { return c_.rows(); }

    /// Largest eigenvalue magnitude of A - K C.
    double lambda_max() const { return lambda_max_; }

    static double spectral_radius(const Matrix& m) {
        return m.eigenvalues().cwiseAbs().maxCoeff();
    }

private:
    static bool full_rank_krylov(const Matrix& a, const Matrix& b) {
        const Eigen::Index n = a.rows();
        Matrix krylov(n, n * b.cols());
        Matrix block = b;
        for (Eigen::Index i = 0; i < n; ++i) {
            krylov.middleCols(i * b.cols(), b.cols()) = block;
            block = a * block;
        }
        return numerical_rank(krylov) == n;
    }

    Matrix a_, b_, c_, d_, k_;
    double lambda_max_ = 0.0;
};

/// Time-indexed input/output records, one sample per column. The
/// innovation sequence is retained for diagnostics when available.
struct TrajectoryBatch {
    Matrix u;  // m x N_data
    Matrix y;  // p x N_data
    std::optional<Matrix> e;

    Eigen::Index length() const { return u.cols(); }

    /// CSV with header t, u_1..u_m, y_1..y_p and e_1..e_p if present.
    void write_csv(std::ostream& os) const {
        os << "t";
        for (Eigen::Index i = 0; i < u.rows(); ++i) os << ",u_" << i + 1;
        for (Eigen::Index i = 0; i < y.rows(); ++i) os << ",y_" << i + 1;
        if (e) {
            for (Eigen::Index i = 0; i < e->rows(); ++i) os << ",e_" << i + 1;
        }
        os << "\n";
        for (Eigen::Index t = 0; t < length(); ++t) {
            os << t;
            for (Eigen::Index i = 0; i < u.rows(); ++i) os << "," << u(i, t);
            for (Eigen::Index i = 0; i < y.rows(); ++i) os << "," << y(i, t);
            if (e) {
                for (Eigen::Index i = 0; i < e->rows(); ++i) os << "," << (*e)(i, t);
            }
            os << "\n";
        }
    }
};

struct NoiseSpec {
    double innovation_std = 0.0;
    std::uint64_t seed = 0;
};

/// Iterates the plant with i.i.d. Gaussian innovations drawn from the
/// seeded generator; deterministic for a fixed seed.
inline TrajectoryBatch simulate(const LinearSystem& sys, const Vector& x0, const Matrix& u,
                                const NoiseSpec& noise) {
    if (u.cols() < 1) throw ShapeError("simulate: empty input sequence");
    if (u.rows() != sys.m_inputs()) throw ShapeError("simulate: input dimension mismatch");
    if (x0.size() != sys.n_states()) throw ShapeError("simulate: x0 dimension mismatch");
    if (noise.innovation_std < 0.0)
        throw std::invalid_argument("simulate: innovation_std must be nonnegative");

    const Eigen::Index n_data = u.cols();
    const Eigen::Index p = sys.p_outputs();
    TrajectoryBatch batch;
    batch.u = u;
    batch.y.resize(p, n_data);
    batch.e = Matrix(p, n_data);

    Rng rng(noise.seed);
    Vector x = x0;
    for (Eigen::Index t = 0; t < n_data; ++t) {
        Vector e(p);
        for (Eigen::Index i = 0; i < p; ++i) e(i) = noise.innovation_std * rng.normal();
        batch.e->col(t) = e;
        batch.y.col(t) = sys.c() * x + sys.d() * u.col(t) + e;
        x = sys.a() * x + sys.b() * u.col(t) + sys.k() * e;
    }
    return batch;
}

/// Conditional-mean (noise-free) response of the plant.
inline Matrix deterministic_response(const LinearSystem& sys, const Vector& x0,
                                     const Matrix& u) {
    return simulate(sys, x0, u, NoiseSpec{0.0, 0}).y;
}

/// Second-order SISO benchmark plant. A, B, C, D are fixed; K is drawn
/// entrywise standard normal and resampled until A - K C is strictly
/// stable (at most 1000 draws).
inline LinearSystem benchmark_system(std::uint64_t seed) {
    Matrix a(2, 2), b(2, 1), c(1, 2), d(1, 1);
    a << 0.7326, -0.0861, 0.1722, 0.9909;
    b << 0.0609, 0.0064;
    c << 0.0, 1.4142;
    d << 0.0;

    Rng rng(seed);
    for (int draw = 0; draw < 1000; ++draw) {
        Matrix k(2, 1);
        k << rng.normal(), rng.normal();
        if (LinearSystem::spectral_radius(a - k * c) < 1.0) {
            return LinearSystem(a, b, c, d, k);
        }
    }
    throw std::runtime_error("benchmark_system: no stable K found in 1000 draws");
}

/// Average signal-to-noise ratio in dB: the variance of the deterministic
/// output over the variance of the noise contribution y - y^d. Returns
/// +infinity when the batch is noise-free.
inline double measure_snr(const TrajectoryBatch& batch, const LinearSystem& sys,
                          const Vector& x0) {
    const Matrix yd = deterministic_response(sys, x0, batch.u);
    const Matrix noise = batch.y - yd;
    const auto variance = [](const Matrix& m) {
        const Vector mean = m.rowwise().mean();
        return (m.colwise() - mean).squaredNorm() / static_cast<double>(m.size());
    };
    const double noise_var = variance(noise);
    if (noise_var == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(variance(yd) / noise_var);
}

/// Steady-state variance of the output noise contribution per unit
/// innovation variance: C P C^T + I with P = A P A^T + K K^T.
inline double unit_noise_output_variance(const LinearSystem& sys) {
    Matrix p = Matrix::Zero(sys.n_states(), sys.n_states());
    const Matrix kk = sys.k() * sys.k().transpose();
    for (int it = 0; it < 100000; ++it) {
        const Matrix next = sys.a() * p * sys.a().transpose() + kk;
        if ((next - p).norm() <= 1e-14 * (1.0 + next.norm())) {
            p = next;
            break;
        }
        p = next;
    }
    const Matrix cpc = sys.c() * p * sys.c().transpose();
    return (cpc.trace() + sys.p_outputs()) / static_cast<double>(sys.p_outputs());
}

/// Innovation standard deviation that yields the target SNR for the
/// given deterministic excitation.
inline double innovation_std_for_snr(const LinearSystem& sys, const Vector& x0,
                                     const Matrix& u, double target_db) {
    const Matrix yd = deterministic_response(sys, x0, u);
    const Vector mean = yd.rowwise().mean();
    const double var_yd = (yd.colwise() - mean).squaredNorm() / static_cast<double>(yd.size());
    const double noise_var = var_yd / std::pow(10.0, target_db / 10.0);
    return std::sqrt(noise_var / unit_noise_output_variance(sys));
}

}  // namespace ddpc
