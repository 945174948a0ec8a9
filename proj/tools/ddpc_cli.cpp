// Command-line front end for the data-driven predictive control toolkit.
//
// Subcommands:
//   generate   — simulate a training dataset and write it as CSV
//   select-rho — score past-horizon candidates and write the FPE table
//   run        — run one Monte-Carlo experiment from a config file
//   sweep      — run a parameter sweep and write the aggregated table
//   compare    — run several schemes against the shared oracle baseline

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ddpc/ddpc.hpp"

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    return os;
}

ddpc::ExperimentConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return ddpc::ExperimentConfig{};
    return ddpc::load_config(config_path);
}

void write_summary(const std::vector<ddpc::ClosedLoopResult>& results,
                   const ddpc::ExperimentConfig& cfg, std::ostream& os) {
    std::vector<double> js, jus;
    Eigen::Index n_failed = 0;
    for (const auto& r : results) {
        if (!r.ok()) {
            ++n_failed;
            continue;
        }
        js.push_back(r.j_index);
        jus.push_back(r.j_u_index);
    }
    const auto [mean_j, std_j] = ddpc::detail::mean_std(js);
    const auto [mean_ju, std_ju] = ddpc::detail::mean_std(jus);
    os.precision(17);
    os << "scheme,n_runs,n_failed,mean_J,std_J,mean_Ju,std_Ju\n";
    os << cfg.scheme.tag() << "," << results.size() << "," << n_failed << "," << mean_j << ","
       << std_j << "," << mean_ju << "," << std_ju << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"data-driven predictive control benchmark harness"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "simulate a training dataset to CSV");
    std::string gen_out = "dataset.csv";
    std::string gen_config;
    std::uint64_t gen_seed = 1;
    generate->add_option("--config", gen_config, "config file (key = value)");
    generate->add_option("--out", gen_out, "output CSV path");
    generate->add_option("--seed", gen_seed, "master seed");

    // select-rho
    auto* select = app.add_subcommand("select-rho", "score past-horizon candidates by FPE");
    std::string sel_config, sel_out = "rho_scores.csv";
    Eigen::Index sel_rho_min = 2, sel_rho_max = 40;
    std::uint64_t sel_seed = 1;
    select->add_option("--config", sel_config, "config file");
    select->add_option("--out", sel_out, "output CSV path");
    select->add_option("--rho-min", sel_rho_min, "smallest candidate");
    select->add_option("--rho-max", sel_rho_max, "largest candidate");
    select->add_option("--seed", sel_seed, "master seed");

    // run
    auto* run = app.add_subcommand("run", "run one experiment from a config file");
    std::string run_config, run_scheme, run_out = "results";
    run->add_option("--config", run_config, "config file")->required();
    run->add_option("--scheme", run_scheme, "override the configured scheme");
    run->add_option("--out", run_out, "output directory");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    std::string sweep_config, sweep_param, sweep_grid, sweep_out;
    sweep->add_option("--config", sweep_config, "config file");
    sweep->add_option("--param", sweep_param, "parameter to sweep");
    sweep->add_option("--grid", sweep_grid, "comma list or lo:factor:hi geometric range");
    sweep->add_option("--out", sweep_out, "output CSV path (default sweep_<param>.csv)");

    // compare
    auto* compare = app.add_subcommand("compare", "compare schemes against the oracle baseline");
    std::string cmp_config, cmp_schemes = "spc,spc_slack,berberich,gamma_ddpc";
    std::string cmp_out = "compare.csv";
    compare->add_option("--config", cmp_config, "config file");
    compare->add_option("--schemes", cmp_schemes, "comma-separated scheme list");
    compare->add_option("--out", cmp_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*generate) {
            ddpc::ExperimentConfig cfg = load_or_default(gen_config);
            if (generate->count("--seed")) cfg.seed = gen_seed;
            const auto sys = ddpc::benchmark_system(ddpc::derive_seed(cfg.seed, 0));
            ddpc::Rng input_rng(ddpc::derive_seed(cfg.seed, 1));
            ddpc::Matrix u(sys.m_inputs(), cfg.n_data);
            for (Eigen::Index t = 0; t < cfg.n_data; ++t)
                for (Eigen::Index i = 0; i < sys.m_inputs(); ++i)
                    u(i, t) = input_rng.uniform(-cfg.excitation_amplitude,
                                                cfg.excitation_amplitude);
            const ddpc::Vector x0 = ddpc::Vector::Zero(sys.n_states());
            double std_e = 0.0;
            if (std::isfinite(cfg.snr_db))
                std_e = ddpc::innovation_std_for_snr(sys, x0, u, cfg.snr_db);
            const auto batch =
                ddpc::simulate(sys, x0, u, {std_e, ddpc::derive_seed(cfg.seed, 2)});
            auto os = open_output(gen_out);
            os.precision(17);
            batch.write_csv(os);
            std::cout << "wrote " << gen_out << " (" << cfg.n_data << " samples, SNR "
                      << ddpc::measure_snr(batch, sys, x0) << " dB)\n";
        } else if (*select) {
            ddpc::ExperimentConfig cfg = load_or_default(sel_config);
            if (select->count("--seed")) cfg.seed = sel_seed;
            const auto sys = ddpc::benchmark_system(ddpc::derive_seed(cfg.seed, 0));
            ddpc::Rng input_rng(ddpc::derive_seed(cfg.seed, 1));
            ddpc::Matrix u(sys.m_inputs(), cfg.n_data);
            for (Eigen::Index t = 0; t < cfg.n_data; ++t)
                for (Eigen::Index i = 0; i < sys.m_inputs(); ++i)
                    u(i, t) = input_rng.uniform(-cfg.excitation_amplitude,
                                                cfg.excitation_amplitude);
            const ddpc::Vector x0 = ddpc::Vector::Zero(sys.n_states());
            double std_e = 0.0;
            if (std::isfinite(cfg.snr_db))
                std_e = ddpc::innovation_std_for_snr(sys, x0, u, cfg.snr_db);
            const auto batch =
                ddpc::simulate(sys, x0, u, {std_e, ddpc::derive_seed(cfg.seed, 2)});
            const auto search = ddpc::select_rho(batch, sel_rho_min, sel_rho_max);
            auto os = open_output(sel_out);
            os.precision(17);
            search.write_csv(os);
            std::cout << "wrote " << sel_out << "; chosen rho = " << search.chosen_rho << "\n";
        } else if (*run) {
            ddpc::ExperimentConfig cfg = ddpc::load_config(run_config);
            if (!run_scheme.empty())
                cfg.scheme.kind = ddpc::SchemeConfig::parse_kind(run_scheme);
            const auto results = ddpc::run_experiment(cfg);
            const fs::path dir(run_out);
            {
                auto os = open_output(dir / ("run_" + cfg.scheme.tag() + ".csv"));
                ddpc::write_runs_csv(results, os);
            }
            {
                auto os = open_output(dir / ("trajectories_" + cfg.scheme.tag() + ".csv"));
                ddpc::write_trajectories_csv(results, os);
            }
            {
                auto os = open_output(dir / "summary.csv");
                write_summary(results, cfg, os);
            }
            std::cout << "wrote " << (dir / "summary.csv").string() << " and per-run CSVs\n";
        } else if (*sweep) {
            ddpc::ExperimentConfig cfg = load_or_default(sweep_config);
            if (!sweep_param.empty()) {
                if (!cfg.sweep) cfg.sweep.emplace();
                cfg.sweep->param = sweep_param;
            }
            if (!sweep_grid.empty()) {
                if (!cfg.sweep) cfg.sweep.emplace();
                cfg.sweep->grid = ddpc::detail::parse_grid(sweep_grid);
            }
            if (!cfg.sweep || cfg.sweep->param.empty())
                throw std::invalid_argument("sweep: no parameter given (use --param)");
            const auto table = ddpc::run_sweep(cfg);
            const std::string out =
                sweep_out.empty() ? "sweep_" + cfg.sweep->param + ".csv" : sweep_out;
            auto os = open_output(out);
            ddpc::write_sweep_csv(table, os);
            std::cout << "wrote " << out << " (" << table.size() << " grid points)\n";
        } else if (*compare) {
            ddpc::ExperimentConfig cfg = load_or_default(cmp_config);
            const auto [j_oracle, ju_oracle] = ddpc::oracle_baseline(cfg);
            auto os = open_output(cmp_out);
            os.precision(17);
            os << "scheme,mean_dJ,std_dJ,mean_dJu,std_dJu,n_ok\n";
            std::stringstream names(cmp_schemes);
            std::string name;
            while (std::getline(names, name, ',')) {
                ddpc::ExperimentConfig scheme_cfg = cfg;
                scheme_cfg.scheme.kind = ddpc::SchemeConfig::parse_kind(ddpc::detail::trim(name));
                const auto results = ddpc::run_experiment(scheme_cfg);
                std::vector<double> dj, dju;
                for (const auto& r : results) {
                    if (!r.ok()) continue;
                    dj.push_back(std::abs(r.j_index - j_oracle));
                    dju.push_back(std::abs(r.j_u_index - ju_oracle));
                }
                const auto [mean_dj, std_dj] = ddpc::detail::mean_std(dj);
                const auto [mean_dju, std_dju] = ddpc::detail::mean_std(dju);
                os << scheme_cfg.scheme.tag() << "," << mean_dj << "," << std_dj << ","
                   << mean_dju << "," << std_dju << "," << dj.size() << "\n";
            }
            std::cout << "wrote " << cmp_out << "\n";
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
