#include "shearmix/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <set>

#include "shearmix/csv_io.hpp"
#include "shearmix/experiments.hpp"
#include "shearmix/fft.hpp"
#include "shearmix/parallel.hpp"

namespace shearmix {

namespace {

const std::vector<std::string> kSubcommands = {
    "lyapunov", "moment-lyapunov", "psi-p",     "symbol", "garding", "egorov",
    "lasota-yorke", "two-point",   "low-freq",  "mix",    "quenched", "full"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

std::string cli_version() { return "shearmix 0.1.0"; }

std::string cli_usage() {
    std::string u = cli_version() + "\nUsage: shearmix <subcommand> [options]\n\nSubcommands:\n";
    for (const auto& s : kSubcommands) u += "  " + s + "\n";
    u +=
        "\nOptions:\n"
        "  --config <path>   flat key=value parameter file\n"
        "  --seed <u64>      master seed (default 1)\n"
        "  --out <dir>       output directory (default out)\n"
        "  --samples <n>     ensemble size (default 200)\n"
        "  --steps <n>       steps per sample (default 25)\n"
        "  --grid <n>        grid size per axis, power of two (default 256)\n"
        "  --p <x>           moment order in [0,1] (default 0.1)\n"
        "  --eps <x>         regularization exponent in (0,1/4) (default 0.2)\n"
        "  --delta <x>       mixing norm order (default p/2)\n"
        "  --workers <n>     worker threads (default hardware)\n";
    return u;
}

std::vector<std::pair<std::string, std::string>> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError{0, "cannot open config file: " + path};
    static const std::set<std::string> known = {"seed", "out",  "samples", "steps",
                                                "grid", "p",    "eps",     "delta",
                                                "workers"};
    std::vector<std::pair<std::string, std::string>> kv;
    std::vector<std::string> unknown;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError{lineno, "expected key = value"};
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError{lineno, "expected key = value"};
        if (!known.count(key)) {
            unknown.push_back(key);
            continue;
        }
        kv.emplace_back(key, value);
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " " + k;
        throw ConfigError{0, msg};
    }
    return kv;
}

namespace {

struct ValueError {
    std::string key;
    std::string reason;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text);

template <>
double parse_number<double>(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ValueError{key, "not a number: " + text};
    }
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& key,
                                          const std::string& text) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw ValueError{key, "not an unsigned integer: " + text};
    }
}

template <>
int parse_number<int>(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing");
        return int(v);
    } catch (...) {
        throw ValueError{key, "not an integer: " + text};
    }
}

void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out")
        cfg.out_dir = value;
    else if (key == "samples")
        cfg.samples = std::size_t(parse_number<std::uint64_t>(key, value));
    else if (key == "steps")
        cfg.steps = std::size_t(parse_number<std::uint64_t>(key, value));
    else if (key == "grid")
        cfg.grid = parse_number<int>(key, value);
    else if (key == "p")
        cfg.p = parse_number<double>(key, value);
    else if (key == "eps")
        cfg.eps = parse_number<double>(key, value);
    else if (key == "delta")
        cfg.delta = parse_number<double>(key, value);
    else if (key == "workers")
        cfg.workers = parse_number<int>(key, value);
}

std::string validate(const RunConfig& cfg) {
    if (cfg.samples < 1) return "samples: must be >= 1";
    if (cfg.steps < 1) return "steps: must be >= 1";
    if (cfg.grid < 8 || !is_pow2(cfg.grid)) return "grid: must be a power of two >= 8";
    if (cfg.p < 0.0 || cfg.p > 1.0) return "p: must lie in [0,1]";
    if (cfg.eps <= 0.0 || cfg.eps >= 0.25) return "eps: must lie in (0, 1/4)";
    if (cfg.delta >= 0.0 && !(cfg.delta > 0.0)) return "delta: must be > 0";
    if (cfg.workers < 0) return "workers: must be >= 1";
    const bool needs_symbol = cfg.subcommand == "symbol" || cfg.subcommand == "garding" ||
                              cfg.subcommand == "lasota-yorke" || cfg.subcommand == "full";
    if (needs_symbol && !(cfg.p > 0.0)) return "p: must be > 0 for " + cfg.subcommand;
    const bool needs_delta = cfg.subcommand == "mix" || cfg.subcommand == "low-freq" ||
                             cfg.subcommand == "quenched" || cfg.subcommand == "full";
    if (needs_delta && !(cfg.effective_delta() > 0.0))
        return "delta: must be > 0 for " + cfg.subcommand + " (set p > 0 or delta)";
    return "";
}

} // namespace

ParseOutcome parse_cli(const std::vector<std::string>& args) {
    ParseOutcome out;
    CLI::App app{cli_version()};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    // presence flags so config-file values only fill unset options
    bool has[9] = {false};
    auto opt = [&](const char* name, auto& target, int idx) {
        auto* o = app.add_option(name, target);
        o->each([&has, idx](const std::string&) { has[idx] = true; });
        return o;
    };
    opt("--seed", cfg.seed, 0);
    opt("--out", cfg.out_dir, 1);
    opt("--samples", cfg.samples, 2);
    opt("--steps", cfg.steps, 3);
    opt("--grid", cfg.grid, 4);
    opt("--p", cfg.p, 5);
    opt("--eps", cfg.eps, 6);
    opt("--delta", cfg.delta, 7);
    opt("--workers", cfg.workers, 8);
    app.add_option("--config", config_path);

    for (const auto& name : kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->fallthrough();
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out.exit_code = kExitOk;
        out.message = cli_usage();
        return out;
    } catch (const CLI::ConversionError& e) {
        out.exit_code = kExitValidation;
        out.message = std::string("validation error: ") + e.what();
        return out;
    } catch (const CLI::ParseError& e) {
        out.exit_code = kExitUsage;
        out.message = std::string(e.what()) + "\n\n" + cli_usage();
        return out;
    }
    for (const auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();

    if (!config_path.empty()) {
        cfg.config_path = config_path;
        try {
            const auto kv = load_config(config_path);
            RunConfig from_file = cfg;
            for (const auto& [k, v] : kv) apply_kv(from_file, k, v);
            // file values as the base, CLI-set fields reapplied on top
            RunConfig merged = from_file;
            if (has[0]) merged.seed = cfg.seed;
            if (has[1]) merged.out_dir = cfg.out_dir;
            if (has[2]) merged.samples = cfg.samples;
            if (has[3]) merged.steps = cfg.steps;
            if (has[4]) merged.grid = cfg.grid;
            if (has[5]) merged.p = cfg.p;
            if (has[6]) merged.eps = cfg.eps;
            if (has[7]) merged.delta = cfg.delta;
            if (has[8]) merged.workers = cfg.workers;
            merged.subcommand = cfg.subcommand;
            merged.config_path = cfg.config_path;
            cfg = merged;
        } catch (const ConfigError& e) {
            out.exit_code = kExitValidation;
            out.message = e.line > 0 ? cfg.config_path + ":" + std::to_string(e.line) +
                                           ": " + e.message
                                     : e.message;
            return out;
        } catch (const ValueError& e) {
            out.exit_code = kExitValidation;
            out.message = "config value for " + e.key + ": " + e.reason;
            return out;
        }
    }

    const std::string err = validate(cfg);
    if (!err.empty()) {
        out.exit_code = kExitValidation;
        out.message = "validation error: " + err;
        return out;
    }
    out.cfg = cfg;
    out.should_run = true;
    return out;
}

// ---------------------------------------------------------------------------
// subcommand execution
// ---------------------------------------------------------------------------

namespace {

EnsembleConfig to_ensemble(const RunConfig& rc) {
    EnsembleConfig cfg;
    cfg.n_samples = rc.samples;
    cfg.n_steps = rc.steps;
    cfg.grid = rc.grid;
    cfg.p = rc.p;
    cfg.eps = rc.eps;
    cfg.delta = rc.effective_delta();
    cfg.seed = rc.seed;
    cfg.workers = rc.workers > 0 ? rc.workers : default_workers();
    return cfg;
}

std::string out_path(const RunConfig& rc, const std::string& file) {
    return rc.out_dir + "/" + file;
}

void write_manifest(const RunConfig& rc, const EnsembleConfig& cfg) {
    CsvWriter w(out_path(rc, rc.subcommand + "_manifest.txt"));
    w.line(cli_version());
    w.line("subcommand=" + rc.subcommand);
    w.line("seed=" + std::to_string(cfg.seed));
    w.line("samples=" + std::to_string(cfg.n_samples));
    w.line("steps=" + std::to_string(cfg.n_steps));
    w.line("grid=" + std::to_string(cfg.grid));
    w.line("p=" + fmt_double(cfg.p));
    w.line("eps=" + fmt_double(cfg.eps));
    w.line("delta=" + fmt_double(cfg.delta));
    w.line("s_low=" + fmt_double(cfg.s_low));
    w.line("workers=" + std::to_string(cfg.workers));
    w.line("psi_nx=" + std::to_string(cfg.psi_nx));
    w.line("psi_ntheta=" + std::to_string(cfg.psi_ntheta));
    w.line("psi_maps=" + std::to_string(cfg.psi_maps));
    w.line("psi_iters=" + std::to_string(cfg.psi_iters));
    if (!rc.config_path.empty()) w.line("config=" + rc.config_path);
}

void write_trace(const std::string& path, const std::vector<TracePoint>& tr) {
    CsvWriter w(path);
    w.line("n,mean,stderr,count");
    for (std::size_t n = 0; n < tr.size(); ++n)
        w.row({double(n), tr[n].mean, tr[n].se, double(tr[n].count)});
}

void write_fit(CsvWriter& w, const std::string& prefix, const RateFit& fit) {
    w.kv(prefix + "_rate", fit.rate);
    w.kv(prefix + "_rate_se", fit.rate_se);
    w.kv(prefix + "_intercept", fit.intercept);
    w.kv(prefix + "_r2", fit.r2);
    w.kv(prefix + "_window_lo", double(fit.win_lo));
    w.kv(prefix + "_window_hi", double(fit.win_hi));
    if (!fit.warning.empty()) w.kv(prefix + "_warning", fit.warning);
}

int run_lyapunov(const RunConfig& rc, const EnsembleConfig& cfg) {
    const auto trace =
        top_lyapunov_trace(cfg.n_steps, cfg.n_samples, cfg.seed, {}, cfg.workers);
    std::vector<TracePoint> pts;
    for (const auto& e : trace) pts.push_back({e.value, e.stderr_, e.n_samples});
    write_trace(out_path(rc, "lyapunov_trace.csv"), pts);
    const auto& last = trace.back();
    CsvWriter w(out_path(rc, "lyapunov_report.csv"));
    w.line("key,value");
    w.kv("lambda1_hat", last.value);
    w.kv("stderr", last.stderr_);
    w.kv("n_steps", double(last.n_steps));
    w.kv("n_samples", double(last.n_samples));
    w.kv("reportable", last.n_steps >= 100 ? 1.0 : 0.0);
    return kExitOk;
}

int run_moment(const RunConfig& rc, const EnsembleConfig& cfg) {
    const auto est = moment_lyapunov_direct(cfg.p, cfg.n_steps, cfg.n_samples, cfg.seed,
                                            {}, cfg.workers);
    std::vector<TracePoint> pts{{est.lambda, est.stderr_, est.n_samples}};
    write_trace(out_path(rc, "moment-lyapunov_trace.csv"), pts);
    CsvWriter w(out_path(rc, "moment-lyapunov_report.csv"));
    w.line("key,value");
    w.kv("p", cfg.p);
    w.kv("lambda_hat", est.lambda);
    w.kv("stderr", est.stderr_);
    w.kv("ess_fraction", est.ess_fraction);
    w.kv("unreliable", est.unreliable ? 1.0 : 0.0);
    return kExitOk;
}

PsiGrid make_psi(const EnsembleConfig& cfg) {
    return psi_power_iteration(cfg.p, cfg.psi_nx, cfg.psi_ntheta, cfg.psi_maps,
                               cfg.psi_iters, cfg.seed, cfg.sampler, cfg.workers);
}

int run_psi(const RunConfig& rc, const EnsembleConfig& cfg) {
    const PsiGrid g = make_psi(cfg);
    std::vector<TracePoint> pts;
    for (double f : g.factors) pts.push_back({f, 0.0, std::size_t(cfg.psi_maps)});
    write_trace(out_path(rc, "psi-p_trace.csv"), pts);
    g.write_csv(out_path(rc, "psi-p_psi.csv"));
    CsvWriter w(out_path(rc, "psi-p_report.csv"));
    w.line("key,value");
    w.kv("p", g.p);
    w.kv("lambda_hat", g.lambda_hat);
    w.kv("lambda_se", g.lambda_se);
    w.kv("lambda_p", g.lambda_p);
    w.kv("min_psi", g.min_value());
    w.kv("max_psi", g.max_value());
    w.kv("final_increment", g.final_increment);
    return kExitOk;
}

int run_symbol(const RunConfig& rc, const EnsembleConfig& cfg) {
    const PsiGrid g = make_psi(cfg);
    const SymbolModel S = build_symbol(g, cfg.eps, cfg.grid);
    // partition deviation over a probe set
    double dev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double z = 0.5 * cfg.grid * i / 1000.0;
        dev = std::max(dev, std::fabs(S.partition().sum_all(z) - 1.0));
    }
    const double s0 =
        seminorm_estimate(S, 0, -cfg.p, 1.0 - cfg.eps, 64, 128, cfg.seed, cfg.workers);
    const double s1 =
        seminorm_estimate(S, 1, -cfg.p, 1.0 - cfg.eps, 64, 128, cfg.seed, cfg.workers);
    CsvWriter w(out_path(rc, "symbol_report.csv"));
    w.line("key,value");
    w.kv("lambda_hat", g.lambda_hat);
    w.kv("min_psi", g.min_value());
    w.kv("max_psi", g.max_value());
    w.kv("partition_max_dev", dev);
    w.kv("seminorm_k0", s0);
    w.kv("seminorm_k1", s1);
    for (int si = 0; si < S.shell_count(); ++si) {
        const std::string tag = "shell_" + std::to_string(S.partition().shells[si]);
        w.kv(tag + "_h", S.h_scale(si));
        w.kv(tag + "_min", S.bank(si).min_value());
        w.kv(tag + "_max", S.bank(si).max_value());
    }
    // (x, k) subsample dump
    CsvWriter d(out_path(rc, "symbol_dump.csv"));
    d.line("ix,iy,k1,k2,value");
    const int nxs = 8;
    const double h = kTwoPi / nxs;
    const int rings[7] = {1, 2, 4, 8, 16, 32, 64};
    for (int i = 0; i < nxs; ++i)
        for (int j = 0; j < nxs; ++j)
            for (int r : rings)
                for (int ai = 0; ai < 8; ++ai) {
                    const double ang = kTwoPi * ai / 8.0;
                    const double k1 = r * std::cos(ang), k2 = r * std::sin(ang);
                    d.row({double(i), double(j), k1, k2,
                           S.eval({i * h, j * h}, k1, k2)});
                }
    return kExitOk;
}

int run_garding_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const PsiGrid g = make_psi(cfg);
    const SymbolModel S = build_symbol(g, cfg.eps, cfg.grid);
    const GardingReport rep = run_garding(cfg, S);
    std::vector<TracePoint> pts;
    for (double q : rep.forms) pts.push_back({q, 0.0, 1});
    write_trace(out_path(rc, "garding_trace.csv"), pts);
    CsvWriter w(out_path(rc, "garding_report.csv"));
    w.line("key,value");
    w.kv("c", rep.c);
    w.kv("C", rep.C);
    w.kv("passes", double(rep.passes));
    w.kv("n_validation", double(rep.n_validation));
    return kExitOk;
}

int run_egorov_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const auto rep = run_egorov_scaling(cfg, {4, 8, 16, 32}, 2);
    CsvWriter w(out_path(rc, "egorov_report.csv"));
    w.line("key,value");
    for (const auto& row : rep.rows)
        w.kv("ratio_K" + std::to_string(row.band), row.ratio);
    w.kv("strictly_decreasing", rep.strictly_decreasing ? 1.0 : 0.0);
    std::vector<TracePoint> pts;
    for (const auto& row : rep.rows) pts.push_back({row.ratio, 0.0, 2});
    write_trace(out_path(rc, "egorov_trace.csv"), pts);
    return kExitOk;
}

int run_ly_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const PsiGrid g = make_psi(cfg);
    const SymbolModel S = build_symbol(g, cfg.eps, cfg.grid);
    const auto rep = run_lasota_yorke(cfg, S, g.lambda_hat);
    std::vector<TracePoint> pts;
    for (const auto& r : rep.validation) pts.push_back({r.lhs_mean, r.lhs_se, cfg.ly_samples});
    write_trace(out_path(rc, "lasota-yorke_trace.csv"), pts);
    CsvWriter w(out_path(rc, "lasota-yorke_report.csv"));
    w.line("key,value");
    w.kv("lambda_hat", rep.lambda_hat);
    w.kv("C", rep.C);
    w.kv("passes", double(rep.passes));
    w.kv("n_validation", double(rep.validation.size()));
    for (const auto& r : rep.validation) {
        w.kv(r.label + "_lhs", r.lhs_mean);
        w.kv(r.label + "_lhs_se", r.lhs_se);
        w.kv(r.label + "_rhs_form", r.rhs_form);
        w.kv(r.label + "_low_norm_sq", r.low_norm_sq);
        w.kv(r.label + "_pass", r.pass ? 1.0 : 0.0);
    }
    return kExitOk;
}

int run_two_point_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const std::vector<double> seps{kTwoPi / 128.0, kTwoPi / 32.0, kTwoPi / 8.0,
                                   kTwoPi / 2.0};
    const auto rep = run_two_point(cfg, seps);
    write_trace(out_path(rc, "two-point_trace.csv"), rep.separations[0].trace);
    for (std::size_t i = 0; i < rep.separations.size(); ++i)
        write_trace(out_path(rc, "two-point_sep" + std::to_string(i) + "_trace.csv"),
                    rep.separations[i].trace);
    CsvWriter w(out_path(rc, "two-point_report.csv"));
    w.line("key,value");
    for (std::size_t i = 0; i < rep.separations.size(); ++i) {
        const auto& s = rep.separations[i];
        const std::string tag = "sep" + std::to_string(i);
        w.kv(tag + "_d0", s.d0);
        w.kv(tag + "_alpha0", s.alpha0);
        w.kv(tag + "_alpha0_se", s.fit.rate_se);
        w.kv(tag + "_prefactor", s.prefactor);
        w.kv(tag + "_r2", s.fit.r2);
    }
    return kExitOk;
}

int run_mix_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const MixingTrace tr = run_annealed_mixing(cfg);
    write_trace(out_path(rc, "mix_trace.csv"), tr.delta_sq);
    CsvWriter w(out_path(rc, "mix_report.csv"));
    w.line("key,value");
    write_fit(w, "fit", tr.fit);
    w.kv("mu_hat", tr.mu_hat);
    w.kv("delta", cfg.delta);
    // field dump: sample 0 at the last reported step
    const std::size_t nlast = tr.delta_sq.size() - 1;
    MapSequence seq;
    seq.seed = cfg.seed;
    const StepSampler sam = cfg.sampler ? cfg.sampler : pierrehumbert_sampler();
    for (std::size_t i = 0; i < nlast; ++i) {
        RngStream rng = make_stream(cfg.seed, kStreamSteps, 0, i);
        seq.steps.push_back(sam(rng));
    }
    pullback(cfg.data(), seq, cfg.grid, cfg.workers)
        .write_csv(out_path(rc, "mix_field.csv"), cfg.seed, nlast);
    return kExitOk;
}

int run_low_freq_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const LowFreqReport rep = run_low_freq_decay(cfg);
    write_trace(out_path(rc, "low-freq_trace.csv"), rep.trace.low_sq);
    CsvWriter w(out_path(rc, "low-freq_report.csv"));
    w.line("key,value");
    write_fit(w, "fit", rep.trace.fit);
    w.kv("s_low", cfg.s_low);
    for (const auto& c : rep.checks) {
        const std::string tag = "check_n" + std::to_string(c.n);
        w.kv(tag + "_spectral", c.spectral_mean);
        w.kv(tag + "_mc", c.mc_mean);
        w.kv(tag + "_combined_se", c.combined_se);
        w.kv(tag + "_pass", c.pass ? 1.0 : 0.0);
    }
    return kExitOk;
}

int run_quenched_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const MixingTrace tr = run_annealed_mixing(cfg);
    const QuenchedReport rep = quenched_from_trace(tr, tr.mu_hat, cfg.n_steps);
    std::vector<TracePoint> pts;
    for (double k : rep.K) pts.push_back({k, 0.0, 1});
    write_trace(out_path(rc, "quenched_trace.csv"), pts);
    CsvWriter w(out_path(rc, "quenched_report.csv"));
    w.line("key,value");
    w.kv("mu_hat", tr.mu_hat);
    w.kv("horizon_half", double(rep.horizon_half));
    w.kv("horizon_full", double(rep.horizon_full));
    const char* qn[3] = {"q05", "q10", "q15"};
    for (int i = 0; i < 3; ++i) {
        w.kv(std::string("ek_") + qn[i] + "_half", rep.ekq_half[i]);
        w.kv(std::string("ek_") + qn[i] + "_full", rep.ekq_full[i]);
    }
    w.kv("stabilization", rep.stabilization);
    double kmin = rep.K.empty() ? 0.0 : rep.K[0];
    for (double k : rep.K) kmin = std::min(kmin, k);
    w.kv("k_min", kmin);
    return kExitOk;
}

int run_full_cmd(const RunConfig& rc, const EnsembleConfig& cfg) {
    const FullPipelineReport rep = run_full_pipeline(cfg);
    write_full_outputs(rep, cfg, rc.out_dir);
    return kExitOk;
}

} // namespace

void write_full_outputs(const FullPipelineReport& rep, const EnsembleConfig& cfg,
                        const std::string& out_dir) {
    ensure_dir(out_dir);
    auto path = [&](const std::string& f) { return out_dir + "/" + f; };
    write_trace(path("mix_trace.csv"), rep.annealed.delta_sq);
    write_trace(path("low-freq_trace.csv"), rep.low_freq.trace.low_sq);
    for (std::size_t i = 0; i < rep.two_point.separations.size(); ++i)
        write_trace(path("two-point_sep" + std::to_string(i) + "_trace.csv"),
                    rep.two_point.separations[i].trace);
    if (!rep.annealed.quad_form.empty())
        write_trace(path("form_trace.csv"), rep.annealed.quad_form);
    std::vector<TracePoint> kpts;
    for (double k : rep.quenched.K) kpts.push_back({k, 0.0, 1});
    write_trace(path("quenched_trace.csv"), kpts);
    rep.psi.write_csv(path("psi-p_psi.csv"));

    CsvWriter w(path("full_report.csv"));
    w.line("key,value");
    for (const auto& pt : rep.curve.points) {
        const std::string tag = "lambda_p" + fmt_double(pt.p);
        w.kv(tag, pt.lambda_hat);
        w.kv(tag + "_se", pt.stderr_);
    }
    w.kv("secant_slope", rep.curve.secant_slope);
    w.kv("secant_se", rep.curve.secant_se);
    w.kv("seminorm", rep.seminorm);
    w.kv("seminorm_doubled", rep.seminorm_doubled);
    w.kv("garding_c", rep.garding.c);
    w.kv("garding_C", rep.garding.C);
    w.kv("garding_passes", double(rep.garding.passes));
    for (const auto& row : rep.egorov.rows)
        w.kv("egorov_ratio_K" + std::to_string(row.band), row.ratio);
    w.kv("ly_C", rep.lasota_yorke.C);
    w.kv("ly_passes", double(rep.lasota_yorke.passes));
    for (std::size_t i = 0; i < rep.two_point.separations.size(); ++i) {
        const auto& s = rep.two_point.separations[i];
        w.kv("alpha0_sep" + std::to_string(i), s.alpha0);
    }
    {
        CsvWriter wf(path("full_fits.csv"));
        wf.line("key,value");
        write_fit(wf, "annealed", rep.annealed.fit);
        write_fit(wf, "lowfreq", rep.low_freq.trace.fit);
    }
    w.kv("mu_hat", rep.mu_hat);
    w.kv("rate_bound_min_lambda_half_alpha0", rep.rate_bound);
    w.kv("quenched_stabilization", rep.quenched.stabilization);
    for (const auto& [name, ok] : rep.flags) w.kv("flag_" + name, ok ? 1.0 : 0.0);
}

int run_cli(const RunConfig& rc) {
    try {
        ensure_dir(rc.out_dir);
        EnsembleConfig cfg = to_ensemble(rc);
        write_manifest(rc, cfg);
        if (rc.subcommand == "lyapunov") return run_lyapunov(rc, cfg);
        if (rc.subcommand == "moment-lyapunov") return run_moment(rc, cfg);
        if (rc.subcommand == "psi-p") return run_psi(rc, cfg);
        if (rc.subcommand == "symbol") return run_symbol(rc, cfg);
        if (rc.subcommand == "garding") return run_garding_cmd(rc, cfg);
        if (rc.subcommand == "egorov") return run_egorov_cmd(rc, cfg);
        if (rc.subcommand == "lasota-yorke") return run_ly_cmd(rc, cfg);
        if (rc.subcommand == "two-point") return run_two_point_cmd(rc, cfg);
        if (rc.subcommand == "low-freq") return run_low_freq_cmd(rc, cfg);
        if (rc.subcommand == "mix") return run_mix_cmd(rc, cfg);
        if (rc.subcommand == "quenched") return run_quenched_cmd(rc, cfg);
        if (rc.subcommand == "full") return run_full_cmd(rc, cfg);
        return kExitUsage;
    } catch (const std::runtime_error&) {
        return kExitIo;
    } catch (const std::invalid_argument&) {
        return kExitValidation;
    }
}

} // namespace shearmix
