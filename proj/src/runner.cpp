#include "ocp/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "ocp/replay.hpp"

namespace fs = std::filesystem;

namespace ocp {

int worker_threads() {
    if (const char* env = std::getenv("OCP_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

RunPlan plan_run(const RunConfig& cfg) {
    RunPlan plan{ThresholdGrid::uniform(cfg.k),
                 LossParams::make(cfg.alpha, cfg.c, LossParams::decay_scale(cfg.horizon, cfg.rho)),
                 theorem_schedule(cfg.k, cfg.horizon)};
    if (cfg.gamma_override) plan.hyper.gamma = *cfg.gamma_override;
    if (cfg.eta_override) plan.hyper.eta = *cfg.eta_override;
    if (cfg.beta_override) plan.hyper.beta = *cfg.beta_override;
    return plan;
}

RunLog run_once(const RunConfig& cfg, int index, const RunOptions& options) {
    const RunPlan plan = plan_run(cfg);
    const std::uint64_t seed = run_seed(cfg.seed, static_cast<std::uint64_t>(index));
    EnvSpec spec = cfg.env;
    spec.horizon = cfg.horizon;
    auto env = make_environment(spec, plan.grid, env_stream_seed(seed));
    return run(*env, cfg.algorithm, plan.grid, plan.params, plan.hyper, cfg.horizon, seed, options);
}

void write_step_csv(const RunLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "t,arm,pi,m,loss,set_size,mc_running,ineff_running\n";
    long long miscovered = 0;
    double size_total = 0.0;
    for (const auto& s : log.steps) {
        miscovered += s.miscovered;
        size_total += static_cast<double>(s.set_size);
        const double tt = static_cast<double>(s.t);
        out << s.t << ',' << s.arm << ',' << format_number(s.pi) << ',' << s.miscovered << ','
            << format_number(s.loss) << ',' << s.set_size << ','
            << format_number(static_cast<double>(miscovered) / tt) << ','
            << format_number(size_total / tt) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_summary(const RunSummary& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "seed = " << s.seed << '\n'
        << "config = " << s.config_digest << '\n'
        << "mc = " << format_number(s.mc) << '\n'
        << "ineff = " << format_number(s.ineff) << '\n'
        << "regret = " << format_number(s.regret) << '\n'
        << "c_mc = " << format_number(s.c_mc) << '\n'
        << "c_gap_scaled = " << format_number(s.c_gap_scaled) << '\n'
        << "bound_rhs = " << format_number(s.bound_rhs) << '\n'
        << "bound_vacuous = " << (s.bound_vacuous ? 1 : 0) << '\n'
        << "lemma1_slack = " << format_number(s.lemma_slack) << '\n'
        << "lemma1_pass = " << (s.lemma_pass ? 1 : 0) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

struct AggRow {
    double mc, ineff, regret, c_mc, c_gap_scaled, bound_rhs, lemma_slack, lemma_pass;
};

AggRow to_row(const RunSummary& s) {
    return {s.mc,          s.ineff,     s.regret,
            s.c_mc,        s.c_gap_scaled, s.bound_rhs,
            s.lemma_slack, s.lemma_pass ? 1.0 : 0.0};
}

void write_agg_row(std::ostream& out, const std::string& label, const AggRow& r) {
    out << label << ',' << format_number(r.mc) << ',' << format_number(r.ineff) << ','
        << format_number(r.regret) << ',' << format_number(r.c_mc) << ','
        << format_number(r.c_gap_scaled) << ',' << format_number(r.bound_rhs) << ','
        << format_number(r.lemma_slack) << ',' << format_number(r.lemma_pass) << '\n';
}

}  // namespace

void write_aggregate(const std::vector<RunSummary>& summaries, const std::string& path) {
    if (summaries.empty()) throw std::invalid_argument("write_aggregate: no summaries");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "seed,mc,ineff,regret,c_mc,c_gap_scaled,bound_rhs,lemma1_slack,lemma1_pass\n";
    AggRow mean{}, lo{}, hi{};
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const AggRow r = to_row(summaries[i]);
        write_agg_row(out, std::to_string(summaries[i].seed), r);
        auto fold = [&](double AggRow::*f) {
            mean.*f += r.*f;
            if (i == 0 || r.*f < lo.*f) lo.*f = r.*f;
            if (i == 0 || r.*f > hi.*f) hi.*f = r.*f;
        };
        fold(&AggRow::mc);
        fold(&AggRow::ineff);
        fold(&AggRow::regret);
        fold(&AggRow::c_mc);
        fold(&AggRow::c_gap_scaled);
        fold(&AggRow::bound_rhs);
        fold(&AggRow::lemma_slack);
        fold(&AggRow::lemma_pass);
    }
    const double n = static_cast<double>(summaries.size());
    mean.mc /= n; mean.ineff /= n; mean.regret /= n; mean.c_mc /= n;
    mean.c_gap_scaled /= n; mean.bound_rhs /= n; mean.lemma_slack /= n; mean.lemma_pass /= n;
    write_agg_row(out, "mean", mean);
    write_agg_row(out, "min", lo);
    write_agg_row(out, "max", hi);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

SuiteResult run_suite(const RunConfig& cfg, bool write_files) {
    validate_config(cfg);
    const std::string digest = config_digest(cfg);
    const fs::path out_dir(cfg.out_dir);
    if (write_files) {
        fs::create_directories(out_dir);
        std::ofstream out(out_dir / "config.txt", std::ios::binary);
        out << serialize_config(cfg);
        if (!out) throw std::runtime_error("cannot write config.txt");
    }

    const int n = cfg.seed_count;
    std::vector<RunSummary> summaries(static_cast<std::size_t>(n));
    std::vector<std::string> errors(static_cast<std::size_t>(n));
    std::atomic<int> next{0};

    auto work = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                const RunLog log = run_once(cfg, i);
                const std::uint64_t seed = run_seed(cfg.seed, static_cast<std::uint64_t>(i));
                const RunPlan plan = plan_run(cfg);
                RunSummary s = summarize(log, plan.params, cfg.algorithm, cfg.k, cfg.horizon,
                                         cfg.delta, seed, digest);
                if (write_files) {
                    write_step_csv(log, (out_dir / ("steps_" + std::to_string(seed) + ".csv")).string());
                    write_summary(s, (out_dir / ("summary_" + std::to_string(seed) + ".txt")).string());
                }
                summaries[static_cast<std::size_t>(i)] = std::move(s);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        }
    };

    const int threads = std::min(worker_threads(), n);
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (int i = 0; i < n; ++i)
        if (!errors[static_cast<std::size_t>(i)].empty())
            throw std::runtime_error("run " + std::to_string(i) + ": " + errors[static_cast<std::size_t>(i)]);

    SuiteResult result;
    result.summaries = std::move(summaries);
    std::sort(result.summaries.begin(), result.summaries.end(),
              [](const RunSummary& a, const RunSummary& b) { return a.seed < b.seed; });
    result.all_lemma_pass = true;
    for (const auto& s : result.summaries) result.all_lemma_pass = result.all_lemma_pass && s.lemma_pass;

    if (write_files) write_aggregate(result.summaries, (out_dir / "aggregate.csv").string());
    return result;
}

int cmd_run(const RunConfig& cfg) {
    try {
        const SuiteResult result = run_suite(cfg, true);
        for (const auto& s : result.summaries)
            if (!s.lemma_pass)
                std::cerr << "lemma-1 violation: seed " << s.seed << " slack "
                          << format_number(s.lemma_slack) << '\n';
        return result.all_lemma_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_sweep(const RunConfig& base, const std::string& axis, const std::vector<std::string>& values) {
    if (axis != "K" && axis != "alpha" && axis != "c" && axis != "T" && axis != "algorithm") {
        std::cerr << "error: sweep axis must be one of K, alpha, c, T, algorithm\n";
        return 2;
    }
    if (values.empty()) {
        std::cerr << "error: sweep needs at least one value\n";
        return 2;
    }
    try {
        const fs::path out_root(base.out_dir);
        fs::create_directories(out_root);
        std::ofstream table(out_root / ("sweep_" + axis + ".csv"), std::ios::binary);
        table << axis << ",mc_mean,mc_min,mc_max,ineff_mean,ineff_min,ineff_max,regret_mean\n";
        bool all_pass = true;
        for (const auto& value : values) {
            RunConfig cfg = base;
            if (axis == "K") cfg.k = static_cast<int>(std::stoll(value));
            else if (axis == "alpha") cfg.alpha = std::stod(value);
            else if (axis == "c") cfg.c = std::stod(value);
            else if (axis == "T") cfg.horizon = std::stoll(value);
            else {
                auto v = variant_from_name(value);
                if (!v) throw std::runtime_error("unknown algorithm '" + value + "'");
                cfg.algorithm = *v;
            }
            cfg.out_dir = (out_root / (axis + "_" + value)).string();
            const SuiteResult result = run_suite(cfg, true);
            all_pass = all_pass && result.all_lemma_pass;
            double mc_mean = 0, mc_min = 0, mc_max = 0, ineff_mean = 0, ineff_min = 0, ineff_max = 0,
                   regret_mean = 0;
            for (std::size_t i = 0; i < result.summaries.size(); ++i) {
                const auto& s = result.summaries[i];
                mc_mean += s.mc;
                ineff_mean += s.ineff;
                regret_mean += s.regret;
                if (i == 0 || s.mc < mc_min) mc_min = s.mc;
                if (i == 0 || s.mc > mc_max) mc_max = s.mc;
                if (i == 0 || s.ineff < ineff_min) ineff_min = s.ineff;
                if (i == 0 || s.ineff > ineff_max) ineff_max = s.ineff;
            }
            const double n = static_cast<double>(result.summaries.size());
            table << value << ',' << format_number(mc_mean / n) << ',' << format_number(mc_min) << ','
                  << format_number(mc_max) << ',' << format_number(ineff_mean / n) << ','
                  << format_number(ineff_min) << ',' << format_number(ineff_max) << ','
                  << format_number(regret_mean / n) << '\n';
        }
        if (!table) throw std::runtime_error("write failed for sweep table");
        return all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

int cmd_make_replay(const RunConfig& cfg, const std::string& path) {
    try {
        if (cfg.horizon == 0) {
            // Degenerate but legal: a header-only stream. Replay runs on it
            // report an empty stream.
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
            write_replay_header(out);
            if (!out) throw std::runtime_error("write failed for '" + path + "'");
            return 0;
        }
        validate_config(cfg);
        const RunPlan plan = plan_run(cfg);
        EnvSpec spec = cfg.env;
        spec.horizon = cfg.horizon;
        // Stream of run 0 under the base seed, so a replay run with the same
        // --seed plays against the identical truth sequence.
        auto env = make_environment(spec, plan.grid,
                                    env_stream_seed(run_seed(cfg.seed, 0)));
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
        write_replay_header(out);
        for (long long t = 1; t <= cfg.horizon; ++t) write_replay_row(out, env->step(t));
        if (!out) throw std::runtime_error("write failed for '" + path + "'");
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

namespace {

struct ParsedSummary {
    std::uint64_t seed = 0;
    std::string digest;
    double mc = 0, ineff = 0, regret = 0, c_mc = 0, c_gap_scaled = 0, bound_rhs = 0, lemma_slack = 0;
    int bound_vacuous = 0, lemma_pass = 0;
};

ParsedSummary parse_summary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    ParsedSummary s;
    std::string line;
    while (std::getline(in, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq - 1);
        const std::string value = line.substr(eq + 2);
        if (key == "seed") s.seed = std::stoull(value);
        else if (key == "config") s.digest = value;
        else if (key == "mc") s.mc = std::stod(value);
        else if (key == "ineff") s.ineff = std::stod(value);
        else if (key == "regret") s.regret = std::stod(value);
        else if (key == "c_mc") s.c_mc = std::stod(value);
        else if (key == "c_gap_scaled") s.c_gap_scaled = std::stod(value);
        else if (key == "bound_rhs") s.bound_rhs = std::stod(value);
        else if (key == "bound_vacuous") s.bound_vacuous = std::stoi(value);
        else if (key == "lemma1_slack") s.lemma_slack = std::stod(value);
        else if (key == "lemma1_pass") s.lemma_pass = std::stoi(value);
    }
    return s;
}

}  // namespace

// Re-validates existing logs: recomputes MC, Ineff and C_mc from the
// per-step CSVs, checks them against the recorded summaries, and re-checks
// the Lemma-1 and theorem-bound inequalities with the recorded regret and
// bound values. Aggregate rows are recomputed as well.
int cmd_check(const std::string& dir) {
    try {
        const fs::path root(dir);
        std::ifstream cfg_in(root / "config.txt");
        if (!cfg_in) throw std::runtime_error("missing config.txt in '" + dir + "'");
        std::stringstream buf;
        buf << cfg_in.rdbuf();
        const RunConfig cfg = parse_config(buf.str());
        const std::string digest = config_digest(cfg);
        const LossParams params =
            LossParams::make(cfg.alpha, cfg.c, LossParams::decay_scale(cfg.horizon, cfg.rho));

        std::vector<std::string> summary_files;
        for (const auto& entry : fs::directory_iterator(root)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("summary_", 0) == 0) summary_files.push_back(entry.path().string());
        }
        std::sort(summary_files.begin(), summary_files.end());
        if (summary_files.empty()) throw std::runtime_error("no summary files in '" + dir + "'");

        int failures = 0;
        const double tol = 1e-7;  // step files carry 9 significant digits
        for (const auto& path : summary_files) {
            const ParsedSummary s = parse_summary_file(path);
            if (s.digest != digest) {
                std::cerr << path << ": config digest mismatch\n";
                ++failures;
                continue;
            }
            const fs::path steps = root / ("steps_" + std::to_string(s.seed) + ".csv");
            std::ifstream in(steps);
            if (!in) throw std::runtime_error("missing " + steps.string());
            std::string line;
            std::getline(in, line);  // header
            long long rounds = 0, n1 = 0;
            double size_total = 0.0, a_sum = 0.0;
            while (std::getline(in, line)) {
                // t,arm,pi,m,loss,set_size,...
                std::vector<std::string> cols;
                std::size_t pos = 0;
                while (true) {
                    auto c = line.find(',', pos);
                    cols.push_back(line.substr(pos, c == std::string::npos ? std::string::npos : c - pos));
                    if (c == std::string::npos) break;
                    pos = c + 1;
                }
                if (cols.size() < 8) throw std::runtime_error(steps.string() + ": malformed row");
                ++rounds;
                const double pi = std::stod(cols[2]);
                const int m = std::stoi(cols[3]);
                n1 += m;
                size_total += std::stod(cols[5]);
                a_sum += inefficiency_term(pi, m, params);
            }
            if (rounds != cfg.horizon) {
                std::cerr << steps.string() << ": expected " << cfg.horizon << " rounds, found "
                          << rounds << '\n';
                ++failures;
                continue;
            }
            const double tt = static_cast<double>(rounds);
            const double mc = static_cast<double>(n1) / tt;
            const double ineff = size_total / tt;
            const double count_term =
                n1 == 0 ? 0.0
                        : (static_cast<double>(n1) * (1.0 - cfg.alpha) -
                           cfg.alpha * static_cast<double>(rounds - n1)) / tt;
            const double cmc = inefficiency_term(0.0, 0, params) - a_sum / tt + count_term;

            bool ok = true;
            auto expect = [&](const char* what, double got, double want) {
                if (std::abs(got - want) > tol * std::max(1.0, std::abs(want))) {
                    std::cerr << path << ": " << what << " mismatch (recomputed "
                              << format_number(got) << ", recorded " << format_number(want) << ")\n";
                    ok = false;
                }
            };
            expect("mc", mc, s.mc);
            expect("ineff", ineff, s.ineff);
            expect("c_mc", cmc, s.c_mc);
            if (mc - cfg.alpha > s.regret / tt + cmc + 1e-9) {
                std::cerr << path << ": lemma-1 inequality violated\n";
                ok = false;
            }
            if (mc - cfg.alpha > s.bound_rhs + 1e-9) {
                std::cerr << path << ": theorem bound violated\n";
                ok = false;
            }
            if (!ok) ++failures;
        }

        // Aggregate rows must equal an independent recomputation. The
        // summaries on disk carry 9 significant digits, so the comparison is
        // numeric rather than byte-wise.
        std::ifstream agg_in(root / "aggregate.csv");
        if (!agg_in) throw std::runtime_error("missing aggregate.csv");
        std::vector<RunSummary> summaries;
        for (const auto& path : summary_files) {
            const ParsedSummary p = parse_summary_file(path);
            RunSummary s;
            s.seed = p.seed;
            s.config_digest = p.digest;
            s.mc = p.mc;
            s.ineff = p.ineff;
            s.regret = p.regret;
            s.c_mc = p.c_mc;
            s.c_gap_scaled = p.c_gap_scaled;
            s.bound_rhs = p.bound_rhs;
            s.bound_vacuous = p.bound_vacuous != 0;
            s.lemma_slack = p.lemma_slack;
            s.lemma_pass = p.lemma_pass != 0;
            summaries.push_back(s);
        }
        std::sort(summaries.begin(), summaries.end(),
                  [](const RunSummary& a, const RunSummary& b) { return a.seed < b.seed; });
        const fs::path tmp = root / "aggregate.check.csv";
        write_aggregate(summaries, tmp.string());
        std::ifstream got_in(tmp);
        bool agg_ok = true;
        std::string got_line, want_line;
        while (true) {
            const bool got_more = static_cast<bool>(std::getline(got_in, got_line));
            const bool want_more = static_cast<bool>(std::getline(agg_in, want_line));
            if (got_more != want_more) {
                agg_ok = false;
                break;
            }
            if (!got_more) break;
            if (got_line == want_line) continue;
            std::stringstream a(got_line), b(want_line);
            std::string fa, fb;
            while (agg_ok) {
                const bool ma = static_cast<bool>(std::getline(a, fa, ','));
                const bool mb = static_cast<bool>(std::getline(b, fb, ','));
                if (ma != mb) agg_ok = false;
                if (!ma || !agg_ok) break;
                if (fa == fb) continue;
                try {
                    const double va = std::stod(fa);
                    const double vb = std::stod(fb);
                    if (std::abs(va - vb) > tol * std::max(1.0, std::abs(vb))) agg_ok = false;
                } catch (...) {
                    agg_ok = false;
                }
            }
            if (!agg_ok) break;
        }
        fs::remove(tmp);
        if (!agg_ok) {
            std::cerr << "aggregate.csv does not match recomputation\n";
            ++failures;
        }

        if (failures == 0) {
            std::cout << "check: " << summary_files.size() << " runs ok\n";
            return 0;
        }
        std::cerr << "check: " << failures << " problem(s)\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ocp
