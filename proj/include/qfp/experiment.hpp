#pragma once

#include "qfp/market.hpp"
#include "qfp/qamc.hpp"
#include "qfp/training.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qfp {

// Config-file problem with a line number for the diagnostic (exit code 2).
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

// CSV-schema problem (exit code 4).
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RunMethod { Exact, MethodI, MethodII, MethodIII };

struct ExperimentPlan {
    RunMethod method = RunMethod::MethodI;
    std::vector<double> strikes{90.0, 100.0, 110.0};
    std::vector<std::pair<int, int>> dims{{7, 7}};
    std::vector<int> data_sizes{2500};
    std::vector<double> epsilons{0.01};
    int repetitions = 10;
    std::uint64_t seed_base = 1;
    int threads = 2;
    bool timing = false;

    MarketParams base_market;
    double truncation_width = 10.0;

    // optional training overrides; negative/zero = per-method default
    int epochs = -1;
    double learning_rate = -1.0;
    double supervised_weight = -1.0;
    double differential_weight = -1.0;
    bool grid_data = true;
    WindowMode window = WindowMode::Extended;

    // Method III knobs
    QaeConfig qae;
    int n_terms_override = 0; // 0 = dim n*n

    void validate() const;
};

// key = value lines, '#' comments; unknown keys are errors.
ExperimentPlan parse_plan(std::istream& config);
ExperimentPlan parse_plan_file(const std::string& path);

struct ResultRow {
    std::string method;
    double strike = 0.0;
    std::string dim;
    double size_or_eps = 0.0;
    long long seed = 0;
    double price = 0.0;
    double abs_error = 0.0;
    double rel_error = 0.0;
    long long shots = 0;
    double wall_time_seconds = 0.0;
    std::string status = "ok";
};

// Runs every (strike, dim, size, repetition) cell of the plan in a worker
// pool, buffers the rows and writes them in plan order, then appends
// median/q25/q75 summary rows per cell group. Deterministic for a fixed
// seed_base (timing column stays 0 unless plan.timing is set).
void cmd_run(const ExperimentPlan& plan, std::ostream& csv);

// Analytic price and the two exact-coefficient Fourier prices per strike.
void cmd_price_exact(const ExperimentPlan& plan, std::ostream& report);

// Per-(method,strike,dim) series files "x median q25 q75" derived from a
// results CSV; returns the written file names.
std::vector<std::string> cmd_plotdata(std::istream& csv, const std::string& out_dir);

// csv helpers shared with the tests
std::string format_double(double v);
std::vector<ResultRow> read_result_rows(std::istream& csv);

} // namespace qfp
