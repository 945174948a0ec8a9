#pragma once

// Data-driven selection of the past horizon rho via Akaike's Final
// Prediction Error criterion applied to a one-step ARX predictor.

#include <Eigen/Dense>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ddpc/plant.hpp"

namespace ddpc {

struct HorizonSearch {
    Eigen::Index rho_min = 0;
    Eigen::Index rho_max = 0;
    std::map<Eigen::Index, double> scores;  // candidate rho -> FPE
    Eigen::Index chosen_rho = 0;

    /// CSV with header rho,fpe.
    void write_csv(std::ostream& os) const {
        os << "rho,fpe\n";
        for (const auto& [rho, fpe] : scores) os << rho << "," << fpe << "\n";
    }
};

/// Scores each candidate rho by the FPE of a least-squares one-step
/// predictor of y(t) from [u(t-rho..t-1), y(t-rho..t-1), u(t)] and
/// returns the argmin (ties broken toward smaller rho).
inline HorizonSearch select_rho(const TrajectoryBatch& batch, Eigen::Index rho_min = 2,
                                Eigen::Index rho_max = 40) {
    if (rho_min < 1 || rho_min > rho_max)
        throw std::invalid_argument("select_rho: need 1 <= rho_min <= rho_max");
    const Eigen::Index m = batch.u.rows();
    const Eigen::Index p = batch.y.rows();
    const Eigen::Index n_data = batch.length();
    if (n_data - rho_max < 10 * (m + p) * rho_max) {
        std::ostringstream msg;
        msg << "select_rho: insufficient data; N_data = " << n_data << " leaves "
            << n_data - rho_max << " regression rows for rho_max = " << rho_max
            << " but at least " << 10 * (m + p) * rho_max << " are required";
        throw std::invalid_argument(msg.str());
    }

    HorizonSearch search;
    search.rho_min = rho_min;
    search.rho_max = rho_max;

    for (Eigen::Index rho = rho_min; rho <= rho_max; ++rho) {
        const Eigen::Index n_rows = n_data - rho;
        const Eigen::Index n_regressors = (m + p) * rho + m;
        Matrix phi(n_rows, n_regressors);
        Matrix target(n_rows, p);
        for (Eigen::Index t = rho; t < n_data; ++t) {
            const Eigen::Index row = t - rho;
            Eigen::Index col = 0;
            for (Eigen::Index lag = rho; lag >= 1; --lag) {
                phi.block(row, col, 1, m) = batch.u.col(t - lag).transpose();
                col += m;
            }
            for (Eigen::Index lag = rho; lag >= 1; --lag) {
                phi.block(row, col, 1, p) = batch.y.col(t - lag).transpose();
                col += p;
            }
            phi.block(row, col, 1, m) = batch.u.col(t).transpose();
            target.row(row) = batch.y.col(t).transpose();
        }

        const Matrix theta = phi.completeOrthogonalDecomposition().solve(target);
        const double residual_var =
            (target - phi * theta).squaredNorm() / static_cast<double>(n_rows * p);
        const double d = static_cast<double>(n_regressors);
        const double n_eff = static_cast<double>(n_rows);
        const double fpe = residual_var * (1.0 + d / n_eff) / (1.0 - d / n_eff);
        search.scores[rho] = fpe;
    }

    search.chosen_rho = search.rho_min;
    double best = search.scores.at(search.rho_min);
    for (const auto& [rho, fpe] : search.scores) {
        if (fpe < best) {
            best = fpe;
            search.chosen_rho = rho;
        }
    }
    return search;
}

}  // namespace ddpc
