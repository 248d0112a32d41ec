#include "CLI11.hpp"

#include "qfp/experiment.hpp"
#include "qfp/qamc.hpp"
#include "qfp/training.hpp"

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSchema = 4;

qfp::ExperimentPlan load_plan(const std::string& config_path) {
    if (config_path.empty()) return qfp::ExperimentPlan{};
    return qfp::parse_plan_file(config_path);
}

int run_subcommand(const std::string& config_path, const std::string& out_path, int threads,
                   bool timing) {
    qfp::ExperimentPlan plan = load_plan(config_path);
    if (threads > 0) plan.threads = threads;
    if (timing) plan.timing = true;
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot open output path '" << out_path << "'\n";
        return kExitIo;
    }
    qfp::cmd_run(plan, out);
    if (!out.good()) {
        std::cerr << "error: write failure on '" << out_path << "'\n";
        return kExitIo;
    }
    std::cerr << "wrote " << out_path << "\n";
    return 0;
}

int plotdata_subcommand(const std::string& csv_path, const std::string& out_dir) {
    std::ifstream in(csv_path);
    if (!in) {
        std::cerr << "error: cannot open '" << csv_path << "'\n";
        return kExitIo;
    }
    const auto files = qfp::cmd_plotdata(in, out_dir);
    for (const auto& f : files) std::cerr << "wrote " << f << "\n";
    return 0;
}

int train_subcommand(const std::string& config_path, int n_qubits, int n_layers, int method_id,
                     int size, std::uint64_t seed, const std::string& model_out,
                     const std::string& series_out) {
    qfp::ExperimentPlan plan = load_plan(config_path);
    const qfp::Method method = method_id == 1 ? qfp::Method::I : qfp::Method::II;
    qfp::TrainingConfig cfg = method == qfp::Method::I ? qfp::TrainingConfig::method1_defaults()
                                                       : qfp::TrainingConfig::method2_defaults();
    cfg.seed = seed;
    cfg.window = plan.window;
    cfg.grid_data = plan.grid_data;
    cfg.truncation_width = plan.truncation_width;
    if (size > 0) cfg.n_train = size;
    if (plan.epochs > 0) cfg.epochs = plan.epochs;
    if (plan.learning_rate > 0.0) cfg.learning_rate = plan.learning_rate;

    qfp::AnsatzSpec spec;
    spec.n_qubits = n_qubits;
    spec.n_layers = n_layers;

    const qfp::TrainedModel model = qfp::train(method, plan.base_market, spec, cfg);
    const qfp::PriceResult res = qfp::price_with_model(method, model, plan.base_market);
    const double oracle = qfp::analytic_put_price(plan.base_market);

    std::cout.precision(10);
    std::cout << "final_loss " << model.loss_history.back() << "\n"
              << "test_mse " << qfp::model_test_mse(model, plan.base_market, cfg.n_test) << "\n"
              << "price " << res.price << "\n"
              << "analytic " << oracle << "\n"
              << "rel_error " << std::abs(res.price - oracle) / oracle << "\n";

    if (!model_out.empty()) {
        std::ofstream out(model_out);
        if (!out) {
            std::cerr << "error: cannot open '" << model_out << "'\n";
            return kExitIo;
        }
        qfp::write_model(out, model);
    }
    if (!series_out.empty()) {
        std::ofstream out(series_out);
        if (!out) {
            std::cerr << "error: cannot open '" << series_out << "'\n";
            return kExitIo;
        }
        qfp::write_series(out, res.series);
    }
    return 0;
}

int qamc_subcommand(const std::string& config_path, int k, bool sine, double eps,
                    std::uint64_t seed) {
    qfp::ExperimentPlan plan = load_plan(config_path);
    qfp::QaeConfig qae = plan.qae;
    qae.epsilon = eps;
    const qfp::Interval interval = qfp::truncation_interval(plan.base_market, plan.truncation_width);
    const auto targets = qfp::discretized_coeffs(plan.base_market, interval, std::max(k, 1), 1 << 14);
    for (const auto& t : targets) {
        if (t.k == k && t.sine == sine) {
            const qfp::QaeResult r = qfp::mrqae_estimate(t, qae, seed);
            std::cout.precision(10);
            std::cout << "k " << t.k << (t.sine ? " sine" : " cosine") << "\n"
                      << "true_value " << t.true_value << "\n"
                      << "estimate " << r.estimate << "\n"
                      << "half_width " << r.half_width << "\n"
                      << "total_shots " << r.total_shots << "\n"
                      << "rounds " << r.rounds << "\n"
                      << "converged " << (r.converged ? "yes" : "no") << "\n";
            return 0;
        }
    }
    std::cerr << "error: coefficient not found\n";
    return kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PQC Fourier option-pricing engine"};
    app.require_subcommand(1);

    std::string config_path, out_path = "results.csv", out_dir = ".", csv_path;
    std::string model_out, series_out;
    int threads = 0, n_qubits = 7, n_layers = 7, method_id = 1, size = 0, k = 0;
    std::uint64_t seed = 1;
    double eps = 0.01;
    bool timing = false, sine = false;

    auto* price_exact = app.add_subcommand("price-exact", "analytic and exact-series prices");
    price_exact->add_option("--config", config_path, "plan config file");

    auto* run = app.add_subcommand("run", "run an experiment plan, writing a CSV");
    run->add_option("--config", config_path, "plan config file");
    run->add_option("--out", out_path, "output CSV path");
    run->add_option("--threads", threads, "worker threads (overrides config)");
    run->add_flag("--timing", timing, "record wall times (breaks byte-reproducibility)");

    auto* plotdata = app.add_subcommand("plotdata", "emit plot series from a results CSV");
    plotdata->add_option("csv", csv_path, "results CSV")->required();
    plotdata->add_option("--outdir", out_dir, "output directory");

    auto* train_cmd = app.add_subcommand("train", "train a single model (debug)");
    train_cmd->add_option("--config", config_path, "plan config file");
    train_cmd->add_option("--qubits", n_qubits, "qubit count");
    train_cmd->add_option("--layers", n_layers, "layer count");
    train_cmd->add_option("--method", method_id, "1 or 2")->check(CLI::Range(1, 2));
    train_cmd->add_option("--size", size, "training set size");
    train_cmd->add_option("--seed", seed, "seed");
    train_cmd->add_option("--model-out", model_out, "model record path");
    train_cmd->add_option("--series-out", series_out, "extracted series path");

    auto* qamc_cmd = app.add_subcommand("qamc", "estimate one coefficient (debug)");
    qamc_cmd->add_option("--config", config_path, "plan config file");
    qamc_cmd->add_option("--k", k, "frequency index");
    qamc_cmd->add_flag("--sine", sine, "sine coefficient (default cosine)");
    qamc_cmd->add_option("--eps", eps, "target half-width");
    qamc_cmd->add_option("--seed", seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(price_exact)) {
            qfp::cmd_price_exact(load_plan(config_path), std::cout);
            return 0;
        }
        if (app.got_subcommand(run)) return run_subcommand(config_path, out_path, threads, timing);
        if (app.got_subcommand(plotdata)) return plotdata_subcommand(csv_path, out_dir);
        if (app.got_subcommand(train_cmd)) {
            return train_subcommand(config_path, n_qubits, n_layers, method_id, size, seed,
                                    model_out, series_out);
        }
        if (app.got_subcommand(qamc_cmd)) return qamc_subcommand(config_path, k, sine, eps, seed);
    } catch (const qfp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const qfp::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
