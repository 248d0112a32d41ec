#include "qfp/experiment.hpp"

#include "qfp/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace qfp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream iss(s);
    while (std::getline(iss, cur, sep)) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected a number, got '" + v + "'");
    }
}

long long parse_int(const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing garbage");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, "expected an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(line, "expected a boolean, got '" + v + "'");
}

std::pair<int, int> parse_dim(const std::string& v, int line) {
    const auto x = v.find('x');
    if (x == std::string::npos) throw ConfigError(line, "dim must look like 7x7, got '" + v + "'");
    const int n = static_cast<int>(parse_int(v.substr(0, x), line));
    const int l = static_cast<int>(parse_int(v.substr(x + 1), line));
    if (n < 1 || l < 1) throw ConfigError(line, "dim entries must be positive");
    return {n, l};
}

std::string method_name(RunMethod m) {
    switch (m) {
    case RunMethod::Exact: return "exact";
    case RunMethod::MethodI: return "I";
    case RunMethod::MethodII: return "II";
    case RunMethod::MethodIII: return "III";
    }
    return "?";
}

// type-7 quantile on a sorted vector
double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - lo;
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

struct Cell {
    double strike;
    std::pair<int, int> dim;
    double size_or_eps;
    int rep;
};

std::uint64_t cell_seed(const ExperimentPlan& plan, const Cell& c) {
    std::uint64_t h = 0x51ab5a11;
    h = hash_mix(h, static_cast<std::uint64_t>(plan.method));
    h = hash_mix(h, static_cast<std::uint64_t>(c.strike * 1024.0));
    h = hash_mix(h, static_cast<std::uint64_t>(c.dim.first * 1000 + c.dim.second));
    std::uint64_t size_bits;
    static_assert(sizeof(double) == sizeof(size_bits));
    std::memcpy(&size_bits, &c.size_or_eps, sizeof(size_bits));
    h = hash_mix(h, size_bits);
    h = hash_mix(h, static_cast<std::uint64_t>(c.rep));
    return plan.seed_base ^ h;
}

ResultRow run_cell(const ExperimentPlan& plan, const Cell& cell) {
    ResultRow row;
    row.method = method_name(plan.method);
    row.strike = cell.strike;
    row.dim = std::to_string(cell.dim.first) + "x" + std::to_string(cell.dim.second);
    row.size_or_eps = cell.size_or_eps;
    row.seed = static_cast<long long>(cell_seed(plan, cell));

    MarketParams market = plan.base_market;
    market.strike = cell.strike;
    const double oracle = analytic_put_price(market);

    const auto start = std::chrono::steady_clock::now();
    try {
        double price = 0.0;
        if (plan.method == RunMethod::Exact) {
            const Interval interval = truncation_interval(market, plan.truncation_width);
            const int K = 64;
            const FourierSeries dens = exact_density_coeffs(market, interval, K);
            price = price_pdf(dens, payoff_coeffs_pdf(market, interval, K), market);
        } else if (plan.method == RunMethod::MethodIII) {
            QaeConfig qae = plan.qae;
            qae.epsilon = cell.size_or_eps;
            const int n_terms = plan.n_terms_override > 0
                                    ? plan.n_terms_override
                                    : cell.dim.first * cell.dim.second;
            const PriceResult res =
                pipeline_method3(market, n_terms, qae, static_cast<std::uint64_t>(row.seed));
            price = res.price;
            row.shots = res.total_shots;
        } else {
            const Method method = plan.method == RunMethod::MethodI ? Method::I : Method::II;
            TrainingConfig cfg = method == Method::I ? TrainingConfig::method1_defaults()
                                                     : TrainingConfig::method2_defaults();
            cfg.n_train = static_cast<int>(cell.size_or_eps);
            cfg.seed = static_cast<std::uint64_t>(row.seed);
            cfg.truncation_width = plan.truncation_width;
            cfg.grid_data = plan.grid_data;
            cfg.window = plan.window;
            if (plan.epochs > 0) cfg.epochs = plan.epochs;
            if (plan.learning_rate > 0.0) cfg.learning_rate = plan.learning_rate;
            if (plan.supervised_weight >= 0.0) cfg.supervised_weight = plan.supervised_weight;
            if (plan.differential_weight >= 0.0) cfg.differential_weight = plan.differential_weight;
            AnsatzSpec spec;
            spec.n_qubits = cell.dim.first;
            spec.n_layers = cell.dim.second;
            const TrainedModel model = train(method, market, spec, cfg);
            price = price_with_model(method, model, market).price;
        }
        row.price = price;
        row.abs_error = std::abs(price - oracle);
        row.rel_error = row.abs_error / oracle;
    } catch (const std::exception& e) {
        row.status = std::string("error:") + e.what();
        std::replace(row.status.begin(), row.status.end(), ',', ';');
    }
    if (plan.timing) {
        row.wall_time_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return row;
}

} // namespace

void ExperimentPlan::validate() const {
    if (strikes.empty()) throw std::invalid_argument("plan: strikes must be nonempty");
    if (dims.empty()) throw std::invalid_argument("plan: dims must be nonempty");
    if (repetitions < 1) throw std::invalid_argument("plan: repetitions >= 1");
    if (method == RunMethod::MethodIII) {
        if (epsilons.empty()) throw std::invalid_argument("plan: epsilons must be nonempty");
    } else if (method != RunMethod::Exact && data_sizes.empty()) {
        throw std::invalid_argument("plan: sizes must be nonempty");
    }
    base_market.validate();
}

ExperimentPlan parse_plan(std::istream& config) {
    ExperimentPlan plan;
    std::string line;
    int line_no = 0;
    while (std::getline(config, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(line_no, "empty value for key '" + key + "'");

        if (key == "method") {
            if (value == "I") plan.method = RunMethod::MethodI;
            else if (value == "II") plan.method = RunMethod::MethodII;
            else if (value == "III") plan.method = RunMethod::MethodIII;
            else if (value == "exact") plan.method = RunMethod::Exact;
            else throw ConfigError(line_no, "method must be one of I, II, III, exact");
        } else if (key == "strikes") {
            plan.strikes.clear();
            for (const auto& v : split(value, ',')) plan.strikes.push_back(parse_double(v, line_no));
        } else if (key == "dims") {
            plan.dims.clear();
            for (const auto& v : split(value, ',')) plan.dims.push_back(parse_dim(v, line_no));
        } else if (key == "sizes") {
            plan.data_sizes.clear();
            for (const auto& v : split(value, ','))
                plan.data_sizes.push_back(static_cast<int>(parse_int(v, line_no)));
        } else if (key == "epsilons") {
            plan.epsilons.clear();
            for (const auto& v : split(value, ',')) plan.epsilons.push_back(parse_double(v, line_no));
        } else if (key == "repetitions") {
            plan.repetitions = static_cast<int>(parse_int(value, line_no));
        } else if (key == "seed_base") {
            plan.seed_base = static_cast<std::uint64_t>(parse_int(value, line_no));
        } else if (key == "threads") {
            plan.threads = static_cast<int>(parse_int(value, line_no));
        } else if (key == "timing") {
            plan.timing = parse_bool(value, line_no);
        } else if (key == "s0") {
            plan.base_market.s0 = parse_double(value, line_no);
        } else if (key == "rate") {
            plan.base_market.rate = parse_double(value, line_no);
        } else if (key == "sigma") {
            plan.base_market.sigma = parse_double(value, line_no);
        } else if (key == "maturity") {
            plan.base_market.maturity = parse_double(value, line_no);
        } else if (key == "t0") {
            plan.base_market.t0 = parse_double(value, line_no);
        } else if (key == "truncation_width") {
            plan.truncation_width = parse_double(value, line_no);
        } else if (key == "epochs") {
            plan.epochs = static_cast<int>(parse_int(value, line_no));
        } else if (key == "learning_rate") {
            plan.learning_rate = parse_double(value, line_no);
        } else if (key == "supervised_weight") {
            plan.supervised_weight = parse_double(value, line_no);
        } else if (key == "differential_weight") {
            plan.differential_weight = parse_double(value, line_no);
        } else if (key == "grid_data") {
            plan.grid_data = parse_bool(value, line_no);
        } else if (key == "window") {
            if (value == "extended") plan.window = WindowMode::Extended;
            else if (value == "plain") plan.window = WindowMode::Plain;
            else throw ConfigError(line_no, "window must be extended or plain");
        } else if (key == "qae_shots_per_round") {
            plan.qae.shots_per_round = static_cast<int>(parse_int(value, line_no));
        } else if (key == "qae_max_rounds") {
            plan.qae.max_rounds = static_cast<int>(parse_int(value, line_no));
        } else if (key == "qae_gamma") {
            plan.qae.gamma = parse_double(value, line_no);
        } else if (key == "n_terms") {
            plan.n_terms_override = static_cast<int>(parse_int(value, line_no));
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }
    try {
        plan.validate();
    } catch (const std::exception& e) {
        throw ConfigError(line_no, e.what());
    }
    return plan;
}

ExperimentPlan parse_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file '" + path + "'");
    return parse_plan(in);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void cmd_run(const ExperimentPlan& plan, std::ostream& csv) {
    plan.validate();

    std::vector<Cell> cells;
    const std::vector<double>& xs = plan.method == RunMethod::MethodIII
                                        ? plan.epsilons
                                        : [&] {
                                              std::vector<double> v;
                                              if (plan.method == RunMethod::Exact) {
                                                  v.push_back(0.0);
                                              } else {
                                                  for (int s : plan.data_sizes)
                                                      v.push_back(static_cast<double>(s));
                                              }
                                              return v;
                                          }();
    for (double strike : plan.strikes)
        for (const auto& dim : plan.dims)
            for (double x : xs)
                for (int rep = 0; rep < plan.repetitions; ++rep)
                    cells.push_back({strike, dim, x, rep});

    std::vector<ResultRow> rows(cells.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(plan.threads, static_cast<int>(cells.size())));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            rows[i] = run_cell(plan, cells[i]);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    csv << "# qfp-results v1: method,strike,dim,size_or_eps,seed,price,abs_error,rel_error,shots,"
           "wall_time_seconds,status\n";
    csv << "method,strike,dim,size_or_eps,seed,price,abs_error,rel_error,shots,wall_time_seconds,"
           "status\n";
    auto emit = [&](const ResultRow& r) {
        csv << r.method << ',' << format_double(r.strike) << ',' << r.dim << ','
            << format_double(r.size_or_eps) << ',' << r.seed << ',' << format_double(r.price)
            << ',' << format_double(r.abs_error) << ',' << format_double(r.rel_error) << ','
            << r.shots << ',' << format_double(r.wall_time_seconds) << ',' << r.status << '\n';
    };
    for (const auto& r : rows) emit(r);

    // per-cell-group summaries over repetitions, in plan order
    std::size_t idx = 0;
    for (double strike : plan.strikes) {
        for (const auto& dim : plan.dims) {
            for (double x : xs) {
                std::vector<double> rel, price, shots;
                for (int rep = 0; rep < plan.repetitions; ++rep, ++idx) {
                    const ResultRow& r = rows[idx];
                    if (r.status == "ok") {
                        rel.push_back(r.rel_error);
                        price.push_back(r.price);
                        shots.push_back(static_cast<double>(r.shots));
                    }
                }
                if (rel.empty()) continue;
                std::sort(rel.begin(), rel.end());
                std::sort(price.begin(), price.end());
                std::sort(shots.begin(), shots.end());
                for (const auto& [q, name] :
                     {std::pair{0.25, "q25"}, std::pair{0.5, "median"}, std::pair{0.75, "q75"}}) {
                    ResultRow s;
                    s.method = method_name(plan.method);
                    s.strike = strike;
                    s.dim = std::to_string(dim.first) + "x" + std::to_string(dim.second);
                    s.size_or_eps = x;
                    s.seed = -1;
                    s.price = quantile(price, q);
                    s.rel_error = quantile(rel, q);
                    s.abs_error = 0.0;
                    s.shots = static_cast<long long>(quantile(shots, q));
                    s.status = name;
                    emit(s);
                }
            }
        }
    }
}

void cmd_price_exact(const ExperimentPlan& plan, std::ostream& report) {
    const int K = 64;
    report.precision(10);
    report << "strike  analytic      fourier_pdf   fourier_cdf   rel_dev_pdf  rel_dev_cdf\n";
    for (double strike : plan.strikes) {
        MarketParams market = plan.base_market;
        market.strike = strike;
        const double ref = analytic_put_price(market);
        const Interval interval = truncation_interval(market, plan.truncation_width);
        const Interval ext = extended_interval(interval);

        const FourierSeries dens = exact_density_coeffs(market, interval, K);
        const double v_pdf = price_pdf(dens, payoff_coeffs_pdf(market, interval, K), market);

        const FourierSeries cdfs = exact_cdf_coeffs(market, ext, K);
        const double v_cdf = price_cdf(cdfs, payoff_coeffs_cdf(market, interval, ext, K), market,
                                       cdf(market, interval.a), cdf(market, interval.b));

        report << strike << "  " << ref << "  " << v_pdf << "  " << v_cdf << "  "
               << std::abs(v_pdf - ref) / ref << "  " << std::abs(v_cdf - ref) / ref << "\n";
    }
}

std::vector<ResultRow> read_result_rows(std::istream& csv) {
    std::vector<ResultRow> rows;
    std::string line;
    bool saw_header = false;
    while (std::getline(csv, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split(line, ',');
        if (!saw_header) {
            static const std::vector<std::string> expected{
                "method", "strike", "dim", "size_or_eps", "seed", "price",
                "abs_error", "rel_error", "shots", "wall_time_seconds", "status"};
            if (fields != expected) {
                throw SchemaError("result CSV header does not match schema v1");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != 11) throw SchemaError("result CSV row with wrong column count");
        ResultRow r;
        r.method = fields[0];
        r.strike = std::stod(fields[1]);
        r.dim = fields[2];
        r.size_or_eps = std::stod(fields[3]);
        r.seed = std::stoll(fields[4]);
        r.price = std::stod(fields[5]);
        r.abs_error = std::stod(fields[6]);
        r.rel_error = std::stod(fields[7]);
        r.shots = std::stoll(fields[8]);
        r.wall_time_seconds = std::stod(fields[9]);
        r.status = fields[10];
        rows.push_back(std::move(r));
    }
    if (!saw_header && !rows.empty()) throw SchemaError("result CSV missing header");
    return rows;
}

std::vector<std::string> cmd_plotdata(std::istream& csv, const std::string& out_dir) {
    const std::vector<ResultRow> rows = read_result_rows(csv);
    std::vector<std::string> written;

    std::map<std::string, std::map<double, std::vector<double>>> groups;
    for (const auto& r : rows) {
        if (r.status != "ok") continue;
        const std::string key = r.method + "_K" + format_double(r.strike) + "_" + r.dim;
        groups[key][r.size_or_eps].push_back(r.rel_error);
    }
    if (groups.empty()) {
        std::cerr << "[qfp] warning: no data rows; nothing to plot\n";
        return written;
    }
    for (auto& [key, by_x] : groups) {
        const std::string path = out_dir + "/series_" + key + ".dat";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << "# x median q25 q75\n";
        for (auto& [x, vals] : by_x) {
            std::sort(vals.begin(), vals.end());
            out << format_double(x) << ' ' << format_double(quantile(vals, 0.5)) << ' '
                << format_double(quantile(vals, 0.25)) << ' ' << format_double(quantile(vals, 0.75))
                << '\n';
        }
        written.push_back(path);
    }
    return written;
}

} // namespace qfp
