#pragma once

// Monte-Carlo experiment runner: dataset generation, the closed-loop test
// protocol, performance indexes, parameter sweeps, and CSV/config I/O.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddpc/controllers.hpp"
#include "ddpc/horizon.hpp"
#include "ddpc/plant.hpp"
#include "ddpc/predictor.hpp"

namespace ddpc {

enum class SchemeKind {
    oracle_mpc,
    spc,
    spc_slack,
    berberich,
    elastic_net,
    gamma_ddpc,
    gamma_ddpc_beta,
    gamma_three_eta,
};

struct SchemeConfig {
    SchemeKind kind = SchemeKind::gamma_ddpc;
    double lambda = 1.0;            // spc_slack
    double bar_lambda_alpha = 0.0;  // berberich
    double lambda_sigma = 1e3;      // berberich
    bool sigma_y_projection = false;
    double lambda1 = 0.0;  // elastic_net
    double lambda2 = 1.0;  // elastic_net
    double beta = 0.0;     // gamma_ddpc_beta
    double eta = 1.0;      // gamma_three_eta

    void validate() const {
        if (lambda < 0 || bar_lambda_alpha < 0 || lambda_sigma < 0 || lambda1 < 0 ||
            lambda2 < 0 || beta < 0 || eta < 0)
            throw std::invalid_argument("SchemeConfig: penalties must be >= 0");
    }

    std::string tag() const {
        switch (kind) {
            case SchemeKind::oracle_mpc: return "oracle_mpc";
            case SchemeKind::spc: return "spc";
            case SchemeKind::spc_slack: return "spc_slack";
            case SchemeKind::berberich: return "berberich";
            case SchemeKind::elastic_net: return "elastic_net";
            case SchemeKind::gamma_ddpc: return "gamma_ddpc";
            case SchemeKind::gamma_ddpc_beta: return "gamma_ddpc_beta";
            case SchemeKind::gamma_three_eta: return "gamma_three_eta";
        }
        return "unknown";
    }

    static SchemeKind parse_kind(const std::string& name) {
        if (name == "oracle_mpc") return SchemeKind::oracle_mpc;
        if (name == "spc") return SchemeKind::spc;
        if (name == "spc_slack") return SchemeKind::spc_slack;
        if (name == "berberich") return SchemeKind::berberich;
        if (name == "elastic_net") return SchemeKind::elastic_net;
        if (name == "gamma_ddpc") return SchemeKind::gamma_ddpc;
        if (name == "gamma_ddpc_beta") return SchemeKind::gamma_ddpc_beta;
        if (name == "gamma_three_eta") return SchemeKind::gamma_three_eta;
        throw std::invalid_argument("unknown scheme: " + name);
    }
};

struct SweepSpec {
    std::string param;
    std::vector<double> grid;
};

struct ExperimentConfig {
    SchemeConfig scheme;
    Eigen::Index n_data = 1000;
    Eigen::Index n_monte_carlo = 30;
    Eigen::Index test_length = 50;  // T_v
    double snr_db = 18.0;           // +inf means noise-free
    Eigen::Index rho = 23;
    bool rho_auto = false;
    Eigen::Index horizon_T = 40;
    double q_scale = 1.0;
    double r_scale = 1e-3;
    Vector x0 = (Vector(2) << 1.0, 1.0).finished();
    Box u_box = Box::unbounded(1);
    Box y_box = Box::unbounded(1);
    bool terminal_constraint = false;
    std::optional<SweepSpec> sweep;
    std::uint64_t seed = 1;
    double excitation_amplitude = 5.0;  // training input uniform on [-amp, amp]

    void validate() const {
        scheme.validate();
        if (n_monte_carlo < 1) throw std::invalid_argument("ExperimentConfig: n_monte_carlo >= 1");
        if (test_length < 1) throw std::invalid_argument("ExperimentConfig: test_length >= 1");
        if (n_data < horizon_T + rho + 1)
            throw std::invalid_argument("ExperimentConfig: n_data too small for T + rho + 1");
    }
};

struct ClosedLoopResult {
    double j_index = 0.0;
    double j_u_index = 0.0;
    Matrix u_traj;  // m x T_v
    Matrix y_traj;  // p x T_v
    std::string scheme_tag;
    std::uint64_t run_seed = 0;
    std::map<std::string, double> diagnostics;
    std::string status = "ok";  // "ok" or a tagged failure

    bool ok() const { return status == "ok"; }
};

namespace detail {

/// Noise-free pre-history state: A^{-rho} x0, so that after rho zero-input
/// warm-up steps the control phase starts exactly at x0.
inline Vector backward_state(const LinearSystem& sys, const Vector& x0, Eigen::Index rho) {
    const auto lu = sys.a().partialPivLu();
    Vector x = x0;
    for (Eigen::Index i = 0; i < rho; ++i) x = lu.solve(x);
    return x;
}

inline InitialCondition pack_window(const Matrix& u_hist, const Matrix& y_hist) {
    const Eigen::Index m = u_hist.rows();
    const Eigen::Index p = y_hist.rows();
    const Eigen::Index rho = u_hist.cols();
    InitialCondition init;
    init.z_init.resize((m + p) * rho);
    for (Eigen::Index k = 0; k < rho; ++k) {
        init.z_init.segment(k * (m + p), m) = u_hist.col(k);
        init.z_init.segment(k * (m + p) + m, p) = y_hist.col(k);
    }
    return init;
}

}  // namespace detail

struct ClosedLoopParams {
    Eigen::Index rho = 0;
    Eigen::Index test_length = 0;
    Vector x0;
    double innovation_std = 0.0;
    std::uint64_t noise_seed = 0;
    Matrix q_weight;
    Matrix r_weight;
};

/// Runs the closed-loop protocol: rho zero-input warm-up steps (with
/// validation noise) from the backward pre-history state, then test_length
/// controlled steps starting exactly from x0. The controller callable
/// receives the assembled past window and a state estimate (exact in the
/// noise-free case, innovation-observer otherwise).
template <class StepFn>
ClosedLoopResult run_closed_loop(const LinearSystem& sys, const ClosedLoopParams& prm,
                                 StepFn&& controller_step) {
    const Eigen::Index m = sys.m_inputs();
    const Eigen::Index p = sys.p_outputs();
    const Eigen::Index rho = prm.rho;
    const Eigen::Index t_v = prm.test_length;

    ClosedLoopResult result;
    result.u_traj = Matrix::Zero(m, t_v);
    result.y_traj = Matrix::Zero(p, t_v);

    Rng rng(prm.noise_seed);
    const auto draw_e = [&]() {
        Vector e(p);
        for (Eigen::Index i = 0; i < p; ++i) e(i) = prm.innovation_std * rng.normal();
        return e;
    };

    Vector x = detail::backward_state(sys, prm.x0, rho);
    const bool noisy = prm.innovation_std > 0.0;
    InnovationObserver observer(sys, Vector::Zero(sys.n_states()));

    Matrix u_hist = Matrix::Zero(m, rho);
    Matrix y_hist = Matrix::Zero(p, rho);
    for (Eigen::Index k = 0; k < rho; ++k) {
        const Vector e = draw_e();
        const Vector y = sys.c() * x + e;
        y_hist.col(k) = y;
        observer.update(Vector::Zero(m), y);
        x = sys.a() * x + sys.k() * e;
    }

    std::map<std::string, double> extras_sum;
    for (Eigen::Index t = 0; t < t_v; ++t) {
        const InitialCondition init = detail::pack_window(u_hist, y_hist);
        const Vector& x_hat = noisy ? observer.state() : x;
        ControlStep step;
        try {
            step = controller_step(init, x_hat);
        } catch (const InfeasibleStepError& err) {
            result.status = std::string("infeasible at step ") + std::to_string(t) + ": " +
                            err.what();
            result.j_index = std::numeric_limits<double>::quiet_NaN();
            result.j_u_index = std::numeric_limits<double>::quiet_NaN();
            return result;
        }
        const Vector u = step.u_first;
        const Vector e = draw_e();
        const Vector y = sys.c() * x + sys.d() * u + e;
        result.u_traj.col(t) = u;
        result.y_traj.col(t) = y;
        result.j_index += y.dot(prm.q_weight * y) + u.dot(prm.r_weight * u);
        result.j_u_index += u.squaredNorm();
        for (const auto& [key, value] : step.decision_extras) extras_sum[key] += value;

        observer.update(u, y);
        x = sys.a() * x + sys.b() * u + sys.k() * e;

        // Shift the past window.
        u_hist.leftCols(rho - 1) = u_hist.rightCols(rho - 1).eval();
        y_hist.leftCols(rho - 1) = y_hist.rightCols(rho - 1).eval();
        u_hist.col(rho - 1) = u;
        y_hist.col(rho - 1) = y;
    }

    for (const auto& [key, value] : extras_sum)
        result.diagnostics["mean_" + key] = value / static_cast<double>(t_v);
    result.diagnostics["y_first_abs"] = result.y_traj.col(0).cwiseAbs().maxCoeff();
    result.diagnostics["y_final_abs"] = result.y_traj.col(t_v - 1).cwiseAbs().maxCoeff();
    return result;
}

/// Recomputes (J, J_u) from a stored trajectory.
inline std::pair<double, double> recompute_indexes(const ClosedLoopResult& r, const Matrix& q,
                                                   const Matrix& rw) {
    double j = 0.0, ju = 0.0;
    for (Eigen::Index t = 0; t < r.y_traj.cols(); ++t) {
        const Vector y = r.y_traj.col(t);
        const Vector u = r.u_traj.col(t);
        j += y.dot(q * y) + u.dot(rw * u);
        ju += u.squaredNorm();
    }
    return {j, ju};
}

namespace detail {

/// Builds the per-run scheme step closure; keeps the controller (and the
/// predictor data it references) alive via shared ownership so the QP
/// factorizations are reused across the receding horizon.
inline std::function<ControlStep(const InitialCondition&, const Vector&)> make_scheme_step(
    const SchemeConfig& sc, std::shared_ptr<const PredictorData> pd, const LinearSystem& sys,
    const ControlSpec& spec) {
    switch (sc.kind) {
        case SchemeKind::oracle_mpc: {
            auto ctrl = std::make_shared<OracleMpcController>(sys, spec);
            return [ctrl](const InitialCondition&, const Vector& x_hat) {
                return ctrl->step(x_hat);
            };
        }
        case SchemeKind::spc:
        case SchemeKind::gamma_ddpc: {
            auto ctrl = std::make_shared<GammaController>(*pd, spec);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
        case SchemeKind::gamma_ddpc_beta: {
            auto ctrl = std::make_shared<GammaController>(*pd, spec, sc.beta);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
        case SchemeKind::gamma_three_eta: {
            auto ctrl = std::make_shared<GammaController>(*pd, spec, 0.0, true, sc.eta);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
        case SchemeKind::spc_slack: {
            auto ctrl = std::make_shared<SlackSpcController>(*pd, spec, sc.lambda);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
        case SchemeKind::berberich: {
            auto ctrl = std::make_shared<BerberichController>(
                *pd, spec, sc.bar_lambda_alpha, sc.lambda_sigma, sc.sigma_y_projection);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
        case SchemeKind::elastic_net: {
            auto ctrl = std::make_shared<ElasticNetController>(*pd, spec, sc.lambda1, sc.lambda2);
            return [ctrl, pd](const InitialCondition& init, const Vector&) {
                return ctrl->step(init);
            };
        }
    }
    throw std::logic_error("make_scheme_step: unreachable");
}

inline bool needs_projector(const SchemeConfig& sc) {
    return sc.kind == SchemeKind::elastic_net ||
           (sc.kind == SchemeKind::berberich && sc.sigma_y_projection);
}

}  // namespace detail

/// One Monte-Carlo run: draws the plant, generates training data at the
/// target SNR, builds the predictor, and runs the closed-loop test.
inline ClosedLoopResult run_single(const ExperimentConfig& cfg, Eigen::Index run_index) {
    const std::uint64_t k_seed = derive_seed(cfg.seed, 4 * static_cast<std::uint64_t>(run_index));
    const std::uint64_t u_seed =
        derive_seed(cfg.seed, 4 * static_cast<std::uint64_t>(run_index) + 1);
    const std::uint64_t train_seed =
        derive_seed(cfg.seed, 4 * static_cast<std::uint64_t>(run_index) + 2);
    const std::uint64_t val_seed =
        derive_seed(cfg.seed, 4 * static_cast<std::uint64_t>(run_index) + 3);

    const LinearSystem sys = benchmark_system(k_seed);
    const Eigen::Index m = sys.m_inputs();
    const Eigen::Index p = sys.p_outputs();

    Rng input_rng(u_seed);
    Matrix u_train(m, cfg.n_data);
    for (Eigen::Index t = 0; t < cfg.n_data; ++t)
        for (Eigen::Index i = 0; i < m; ++i)
            u_train(i, t) = input_rng.uniform(-cfg.excitation_amplitude, cfg.excitation_amplitude);

    const Vector x0_train = Vector::Zero(sys.n_states());
    double innovation_std = 0.0;
    if (std::isfinite(cfg.snr_db))
        innovation_std = innovation_std_for_snr(sys, x0_train, u_train, cfg.snr_db);
    const TrajectoryBatch batch = simulate(sys, x0_train, u_train, {innovation_std, train_seed});

    Eigen::Index rho = cfg.rho;
    if (cfg.rho_auto) rho = select_rho(batch).chosen_rho;

    ControlSpec spec = ControlSpec::regulation(m, p, cfg.horizon_T, rho, cfg.q_scale, cfg.r_scale);
    spec.u_box = cfg.u_box;
    spec.y_box = cfg.y_box;
    spec.terminal_constraint = cfg.terminal_constraint;

    std::shared_ptr<const PredictorData> pd;
    if (cfg.scheme.kind != SchemeKind::oracle_mpc) {
        const HankelSet h = build_hankel_set(batch.u, batch.y, rho, cfg.horizon_T);
        pd = std::make_shared<const PredictorData>(
            build_predictor(h, detail::needs_projector(cfg.scheme)));
    }

    ClosedLoopParams prm;
    prm.rho = rho;
    prm.test_length = cfg.test_length;
    prm.x0 = cfg.x0;
    prm.innovation_std = innovation_std;
    prm.noise_seed = val_seed;
    prm.q_weight = spec.q_weight;
    prm.r_weight = spec.r_weight;

    ClosedLoopResult result;
    try {
        const auto step = detail::make_scheme_step(cfg.scheme, pd, sys, spec);
        result = run_closed_loop(sys, prm, step);
    } catch (const std::exception& err) {
        result.status = std::string("failed: ") + err.what();
        result.j_index = std::numeric_limits<double>::quiet_NaN();
        result.j_u_index = std::numeric_limits<double>::quiet_NaN();
    }
    result.scheme_tag = cfg.scheme.tag();
    result.run_seed = k_seed;
    result.diagnostics["rho"] = static_cast<double>(rho);
    result.diagnostics["innovation_std"] = innovation_std;
    return result;
}

inline std::vector<ClosedLoopResult> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<ClosedLoopResult> results;
    results.reserve(static_cast<std::size_t>(cfg.n_monte_carlo));
    for (Eigen::Index i = 0; i < cfg.n_monte_carlo; ++i) results.push_back(run_single(cfg, i));
    return results;
}

struct SweepRow {
    std::string param;
    double value = 0.0;
    double mean_dj = 0.0;
    double std_dj = 0.0;
    double mean_dju = 0.0;
    double std_dju = 0.0;
    double mean_j = 0.0;
    Eigen::Index n_ok = 0;
};

namespace detail {

inline void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, double value) {
    if (param == "beta")
        cfg.scheme.beta = value;
    else if (param == "eta")
        cfg.scheme.eta = value;
    else if (param == "lambda")
        cfg.scheme.lambda = value;
    else if (param == "lambda1")
        cfg.scheme.lambda1 = value;
    else if (param == "lambda2")
        cfg.scheme.lambda2 = value;
    else if (param == "bar_lambda_alpha")
        cfg.scheme.bar_lambda_alpha = value;
    else if (param == "lambda_sigma")
        cfg.scheme.lambda_sigma = value;
    else if (param == "n_data")
        cfg.n_data = static_cast<Eigen::Index>(value);
    else if (param == "rho")
        cfg.rho = static_cast<Eigen::Index>(value);
    else if (param == "snr_db")
        cfg.snr_db = value;
    else
        throw std::invalid_argument("unknown sweep parameter: " + param);
}

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN()};
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    var /= static_cast<double>(xs.size());
    return {mean, std::sqrt(var)};
}

}  // namespace detail

/// Mean oracle indexes over the experiment's Monte-Carlo seeds; the shared
/// baseline for every scheme and grid point in a comparison.
inline std::pair<double, double> oracle_baseline(const ExperimentConfig& cfg) {
    ExperimentConfig oracle_cfg = cfg;
    oracle_cfg.scheme = SchemeConfig{};
    oracle_cfg.scheme.kind = SchemeKind::oracle_mpc;
    const auto results = run_experiment(oracle_cfg);
    std::vector<double> js, jus;
    for (const auto& r : results) {
        if (!r.ok()) continue;
        js.push_back(r.j_index);
        jus.push_back(r.j_u_index);
    }
    if (js.empty()) throw std::runtime_error("oracle_baseline: all oracle runs failed");
    return {detail::mean_std(js).first, detail::mean_std(jus).first};
}

/// Runs the experiment once per grid point of cfg.sweep and aggregates
/// |J - J_oracle_mean| and |J_u - J_u_oracle_mean| per point. The oracle
/// baseline is computed once. Grid points where n_data changes reuse the
/// same baseline (the oracle does not depend on the training data).
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.sweep || cfg.sweep->grid.empty())
        throw std::invalid_argument("run_sweep: sweep grid is empty");

    const auto [j_oracle, ju_oracle] = oracle_baseline(cfg);

    std::vector<SweepRow> table;
    for (const double value : cfg.sweep->grid) {
        ExperimentConfig point_cfg = cfg;
        point_cfg.sweep.reset();
        detail::apply_sweep_value(point_cfg, cfg.sweep->param, value);
        const auto results = run_experiment(point_cfg);

        std::vector<double> dj, dju, js;
        Eigen::Index n_ok = 0;
        for (const auto& r : results) {
            if (!r.ok()) continue;
            ++n_ok;
            dj.push_back(std::abs(r.j_index - j_oracle));
            dju.push_back(std::abs(r.j_u_index - ju_oracle));
            js.push_back(r.j_index);
        }
        SweepRow row;
        row.param = cfg.sweep->param;
        row.value = value;
        std::tie(row.mean_dj, row.std_dj) = detail::mean_std(dj);
        std::tie(row.mean_dju, row.std_dju) = detail::mean_std(dju);
        row.mean_j = detail::mean_std(js).first;
        row.n_ok = n_ok;
        table.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// CSV writers

inline void write_runs_csv(const std::vector<ClosedLoopResult>& results, std::ostream& os) {
    os.precision(17);
    os << "run_id,scheme,J,J_u,status\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        os << i << "," << r.scheme_tag << "," << r.j_index << "," << r.j_u_index << ","
           << r.status << "\n";
    }
}

inline void write_trajectories_csv(const std::vector<ClosedLoopResult>& results,
                                   std::ostream& os) {
    os.precision(17);
    os << "run_id,t";
    if (!results.empty()) {
        for (Eigen::Index i = 0; i < results.front().u_traj.rows(); ++i) os << ",u_" << i + 1;
        for (Eigen::Index i = 0; i < results.front().y_traj.rows(); ++i) os << ",y_" << i + 1;
    }
    os << "\n";
    for (std::size_t run = 0; run < results.size(); ++run) {
        const auto& r = results[run];
        if (!r.ok()) continue;
        for (Eigen::Index t = 0; t < r.u_traj.cols(); ++t) {
            os << run << "," << t;
            for (Eigen::Index i = 0; i < r.u_traj.rows(); ++i) os << "," << r.u_traj(i, t);
            for (Eigen::Index i = 0; i < r.y_traj.rows(); ++i) os << "," << r.y_traj(i, t);
            os << "\n";
        }
    }
}

inline void write_sweep_csv(const std::vector<SweepRow>& table, std::ostream& os) {
    os.precision(17);
    os << "param,value,mean_dJ,std_dJ,mean_dJu,std_dJu\n";
    for (const auto& row : table) {
        os << row.param << "," << row.value << "," << row.mean_dj << "," << row.std_dj << ","
           << row.mean_dju << "," << row.std_dju << "\n";
    }
}

// ---------------------------------------------------------------------------
// Config file parsing: `key = value` lines, '#' comments, blank lines ok.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<double> parse_grid(const std::string& text) {
    // Either a comma list "0,1e-2,1" or a geometric range "lo:factor:hi".
    std::vector<double> grid;
    const auto c1 = text.find(':');
    if (c1 != std::string::npos) {
        const auto c2 = text.find(':', c1 + 1);
        if (c2 == std::string::npos)
            throw std::invalid_argument("grid range needs lo:factor:hi, got: " + text);
        const double lo = std::stod(text.substr(0, c1));
        const double factor = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        const double hi = std::stod(text.substr(c2 + 1));
        if (lo <= 0.0 || factor <= 1.0 || hi < lo)
            throw std::invalid_argument("grid range needs 0 < lo <= hi and factor > 1: " + text);
        for (double v = lo; v <= hi * (1.0 + 1e-12); v *= factor) grid.push_back(v);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(trim(item)));
    return grid;
}

inline Vector parse_vector(const std::string& text) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(trim(item)));
    Vector v(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

inline bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false, got: " + text);
}

}  // namespace detail

/// Parses `key = value` configuration text into an ExperimentConfig.
/// Unknown keys and malformed values raise errors naming the key.
inline ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        try {
            if (key == "scheme")
                cfg.scheme.kind = SchemeConfig::parse_kind(value);
            else if (key == "n_data")
                cfg.n_data = std::stol(value);
            else if (key == "n_monte_carlo")
                cfg.n_monte_carlo = std::stol(value);
            else if (key == "test_length")
                cfg.test_length = std::stol(value);
            else if (key == "snr_db")
                cfg.snr_db = value == "inf" ? std::numeric_limits<double>::infinity()
                                            : std::stod(value);
            else if (key == "rho") {
                if (value == "auto")
                    cfg.rho_auto = true;
                else
                    cfg.rho = std::stol(value);
            } else if (key == "horizon_T")
                cfg.horizon_T = std::stol(value);
            else if (key == "q_scale")
                cfg.q_scale = std::stod(value);
            else if (key == "r_scale")
                cfg.r_scale = std::stod(value);
            else if (key == "x0")
                cfg.x0 = detail::parse_vector(value);
            else if (key == "u_min")
                cfg.u_box.lower = detail::parse_vector(value);
            else if (key == "u_max")
                cfg.u_box.upper = detail::parse_vector(value);
            else if (key == "y_min")
                cfg.y_box.lower = detail::parse_vector(value);
            else if (key == "y_max")
                cfg.y_box.upper = detail::parse_vector(value);
            else if (key == "terminal_constraint")
                cfg.terminal_constraint = detail::parse_bool(value, key);
            else if (key == "sigma_y_projection")
                cfg.scheme.sigma_y_projection = detail::parse_bool(value, key);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "excitation_amplitude")
                cfg.excitation_amplitude = std::stod(value);
            else if (key == "lambda")
                cfg.scheme.lambda = std::stod(value);
            else if (key == "bar_lambda_alpha")
                cfg.scheme.bar_lambda_alpha = std::stod(value);
            else if (key == "lambda_sigma")
                cfg.scheme.lambda_sigma = std::stod(value);
            else if (key == "lambda1")
                cfg.scheme.lambda1 = std::stod(value);
            else if (key == "lambda2")
                cfg.scheme.lambda2 = std::stod(value);
            else if (key == "beta")
                cfg.scheme.beta = std::stod(value);
            else if (key == "eta")
                cfg.scheme.eta = std::stod(value);
            else if (key == "sweep_param") {
                if (!cfg.sweep) cfg.sweep.emplace();
                cfg.sweep->param = value;
            } else if (key == "sweep_grid") {
                if (!cfg.sweep) cfg.sweep.emplace();
                cfg.sweep->grid = detail::parse_grid(value);
            } else
                throw std::invalid_argument("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config key '" + key + "': cannot parse value: " + value);
        }
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(is);
}

}  // namespace ddpc
