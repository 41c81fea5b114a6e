#include "stripcs/experiment.hpp"

#include "stripcs/concentration.hpp"
#include "stripcs/parallel.hpp"
#include "stripcs/rng.hpp"
#include "stripcs/stripcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace stripcs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kKindNames[] = {"certify", "strip", "coherence", "condition", "recon",
                                      "recon-sweep", "mcdiarmid", "noise", "bounds"};

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(bool v) { return v ? "1" : "0"; }

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

template <class T>
T get_field(const json& j, const char* key, const std::string& path, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(path + key, "wrong type");
    }
}

void check_params(const MatrixSpec& spec) {
    std::set<std::string> allowed;
    std::set<std::string> required;
    switch (spec.family) {
    case Family::Chirp: required = {"p"}; break;
    case Family::DelsarteGoethals: required = {"m"}; allowed = {"r"}; break;
    case Family::SecondOrderRM: required = {"m"}; break;
    case Family::BCH: required = {"m", "t"}; break;
    case Family::PartialFourier:
    case Family::Gaussian: required = {"N", "C"}; break;
    case Family::Dense: throw ConfigError("matrix.family", "dense matrices have no spec form");
    }
    allowed.insert(required.begin(), required.end());
    allowed.insert("subsample");
    for (const auto& key : required)
        if (!spec.params.contains(key))
            throw ConfigError("matrix.params." + key, "required for family " + family_name(spec.family));
    for (auto it = spec.params.begin(); it != spec.params.end(); ++it) {
        if (!allowed.contains(it.key()))
            throw ConfigError("matrix.params." + it.key(), "not a parameter of family " + family_name(spec.family));
        if (!it.value().is_number_integer() || it.value().get<std::int64_t>() < 0)
            throw ConfigError("matrix.params." + it.key(), "expected a non-negative integer");
    }
}

bool is_dg(const SensingMatrix& m) { return m.dg_set() != nullptr; }

// Writes tables and removes everything written if the run fails.
class OutputSet {
public:
    OutputSet(const ExperimentConfig& cfg, std::string hash) : cfg_(cfg), hash_(std::move(hash)), dir_(cfg.out) {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_dir_ = true;
        }
    }
    ~OutputSet() {
        if (committed_) return;
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
        if (created_dir_) fs::remove(dir_, ec);
    }
    void commit() { committed_ = true; }
    const std::vector<std::string>& files() const { return names_; }

    // Aligned text of the first table written, for the terminal.
    const std::string& display() const { return display_; }

    void table(const Table& t) {
        if (display_.empty()) display_ = render(t);
        if (cfg_.format == "json") {
            json arr = json::array();
            for (const auto& r : t.rows) {
                json o;
                o["config_hash"] = hash_;
                for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = r[i];
                arr.push_back(o);
            }
            write(t.name + ".json", json{{"config_hash", hash_}, {"rows", arr}}.dump(2) + "\n");
            return;
        }
        std::ostringstream os;
        os << "# stripcs " << experiment_kind_name(cfg_.kind) << " matrix=" << cfg_.matrix.describe()
           << " seed=" << cfg_.seed << '\n';
        os << "config_hash";
        for (const auto& c : t.columns) os << ',' << c;
        os << '\n';
        for (const auto& r : t.rows) {
            os << hash_;
            for (const auto& v : r) os << ',' << v;
            os << '\n';
        }
        write(t.name + ".csv", os.str());
    }

    // Whitespace-separated columns for gnuplot.
    void dat(const Table& t) {
        std::ostringstream os;
        os << "# " << cfg_.matrix.describe() << " seed=" << cfg_.seed << " config_hash=" << hash_ << "\n#";
        for (const auto& c : t.columns) os << ' ' << c;
        os << '\n';
        for (const auto& r : t.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
            os << '\n';
        }
        write(t.name + ".dat", os.str());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        files_.push_back(p);
        names_.push_back(name);
        f << content;
        if (!f) throw std::runtime_error("write failed for " + p.string());
    }

private:
    static std::string shorten(const std::string& cell) {
        if (cell.find_first_of(".e") == std::string::npos) return cell;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() + cell.size()) return cell;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    static std::string render(Table t) {
        const std::size_t shown = std::min<std::size_t>(t.rows.size(), 20);
        for (std::size_t r = 0; r < shown; ++r)
            for (auto& cell : t.rows[r]) cell = shorten(cell);
        std::vector<std::size_t> width(t.columns.size());
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            width[i] = t.columns[i].size();
            for (std::size_t r = 0; r < shown; ++r) width[i] = std::max(width[i], t.rows[r][i].size());
        }
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                os << (i ? "  " : "") << std::string(width[i] - cells[i].size(), ' ') << cells[i];
            os << '\n';
        };
        line(t.columns);
        for (std::size_t r = 0; r < shown; ++r) line(t.rows[r]);
        if (shown < t.rows.size()) os << "... " << t.rows.size() - shown << " more rows in " << t.name << '\n';
        return os.str();
    }

    const ExperimentConfig& cfg_;
    std::string display_;
    std::string hash_;
    fs::path dir_;
    bool created_dir_ = false;
    bool committed_ = false;
    std::vector<fs::path> files_;
    std::vector<std::string> names_;
};

struct RunContext {
    const ExperimentConfig& cfg;
    const SensingMatrix& matrix;
    OutputSet& out;
    json& summary;
    bool pass = true;
};

double matrix_eta(const SensingMatrix& matrix) {
    const double eta = column_sum_eta(matrix);
    if (!(eta > 0)) throw std::runtime_error("matrix has a non-identity column sum of size N; no column-sum exponent");
    return eta;
}

void run_certify(RunContext& ctx) {
    CertifyOptions opt;
    opt.mode = ctx.cfg.certify_mode == "sampled" ? CertifyMode::Sampled : CertifyMode::Exhaustive;
    opt.seed = ctx.cfg.seed;
    opt.threads = ctx.cfg.threads;
    const auto cert = certify(ctx.matrix, opt);
    ctx.summary["certificate"] = cert.to_json();
    ctx.pass = cert.all_pass();
    Table t{"certify",
            {"N", "C", "mode", "unimodular", "st1_row_orthogonality", "st1_row_sum", "st2", "st3", "eta",
             "max_column_sum_sq"},
            {}};
    t.rows.push_back({num(std::uint64_t{cert.N}), num(cert.C), certify_mode_name(cert.mode), num(cert.unimodular_pass),
                      num(cert.st1_row_orthogonality_pass), num(cert.st1_row_sum_pass), num(cert.st2_pass),
                      num(cert.st3_pass), num(cert.st3_eta), num(cert.max_column_sum_sq)});
    ctx.out.table(t);
    Table h{"column_sums", {"abs_sum_sq", "count"}, {}};
    for (const auto& [v, n] : cert.column_sum_sq_values) h.rows.push_back({num(v), num(n)});
    ctx.out.table(h);
    ctx.out.write("certificate.json", cert.to_json().dump(2) + "\n");
}

void run_strip(RunContext& ctx) {
    const auto& M = ctx.matrix;
    const double N = static_cast<double>(M.rows()), C = static_cast<double>(M.cols());
    const double eta = matrix_eta(M);
    Table trials{"strip", {"k", "epsilon", "trial", "distortion", "violated"}, {}};
    Table sum{"strip_summary", {"k", "epsilon", "eta", "failure_rate", "delta", "vacuous", "sigma", "pass"}, {}};
    json rows = json::array();
    for (auto k : ctx.cfg.ks) {
        const auto mc = strip_montecarlo(M, k, ctx.cfg.epsilon, ctx.cfg.values, ctx.cfg.trials,
                                         derive_seed(ctx.cfg.seed, k), ctx.cfg.threads);
        const auto d = strip_delta(N, C, static_cast<double>(k), ctx.cfg.epsilon, eta);
        const double sig = binomial_sigma(d.value, ctx.cfg.trials);
        const bool ok = d.vacuous || mc.failure_rate <= d.value + 3.0 * sig;
        ctx.pass = ctx.pass && ok;
        for (std::size_t t = 0; t < mc.trials.size(); ++t)
            trials.rows.push_back({num(std::uint64_t{k}), num(ctx.cfg.epsilon), num(std::uint64_t{t}),
                                   num(mc.trials[t].distortion), num(mc.trials[t].violated)});
        sum.rows.push_back({num(std::uint64_t{k}), num(ctx.cfg.epsilon), num(eta), num(mc.failure_rate), num(d.value),
                            num(d.vacuous), num(sig), num(ok)});
        rows.push_back({{"k", k}, {"failure_rate", mc.failure_rate}, {"delta", d.value}, {"vacuous", d.vacuous}, {"pass", ok}});
    }
    ctx.summary["eta"] = eta;
    ctx.summary["rows"] = rows;
    ctx.out.table(sum);
    ctx.out.table(trials);
}

void run_coherence(RunContext& ctx) {
    const auto& M = ctx.matrix;
    const double N = static_cast<double>(M.rows()), C = static_cast<double>(M.cols());
    const double eta = matrix_eta(M);
    Table t{"coherence",
            {"k", "policy", "mean", "standard_error", "expected_mean", "max", "threshold", "delta", "tail", "sigma", "pass"},
            {}};
    for (auto k : ctx.cfg.ks) {
        const auto d = strip_delta(N, C, static_cast<double>(k), ctx.cfg.epsilon, eta);
        CoherenceOptions opt;
        opt.policy = ctx.cfg.w_policy == "all" ? WPolicy::All : WPolicy::Fixed;
        opt.trials = ctx.cfg.trials;
        opt.seed = derive_seed(ctx.cfg.seed, k);
        opt.threads = ctx.cfg.threads;
        opt.threshold = d.vacuous ? std::numeric_limits<double>::infinity()
                                  : coherence_threshold(N, C, static_cast<double>(k), eta, d.value);
        const auto st = coherence_stats(M, k, opt);
        const double sig = binomial_sigma(d.value, ctx.cfg.trials);
        const bool ok = d.vacuous || st.tail_estimate <= d.value + 3.0 * sig;
        ctx.pass = ctx.pass && ok;
        t.rows.push_back({num(std::uint64_t{k}), ctx.cfg.w_policy, num(st.mean), num(st.standard_error),
                          num(coherence_mean(N, C, static_cast<double>(k))), num(st.max), num(opt.threshold),
                          num(d.value), num(st.tail_estimate), num(sig), num(ok)});
    }
    ctx.summary["eta"] = eta;
    ctx.out.table(t);
}

void run_condition(RunContext& ctx) {
    Table rows{"condition", {"ensemble", "k", "trial", "cond"}, {}};
    Table sum{"condition_summary", {"ensemble", "k", "mean", "std", "infinite"}, {}};
    Table dat{"condition", {"k", "mean", "std"}, {}};
    auto one = [&](const SensingMatrix& M, const std::string& label) {
        const auto r = condition_experiment(M, ctx.cfg.ks, ctx.cfg.trials, ctx.cfg.seed, ctx.cfg.threads);
        for (const auto& row : r.rows)
            rows.rows.push_back({label, num(std::uint64_t{row.k}), num(std::uint64_t{row.trial}), num(row.cond)});
        for (const auto& s : r.summary) {
            sum.rows.push_back({label, num(std::uint64_t{s.k}), num(s.mean), num(s.std), num(std::uint64_t{s.infinite})});
            if (label == "matrix") dat.rows.push_back({num(std::uint64_t{s.k}), num(s.mean), num(s.std)});
        }
        return r;
    };
    one(ctx.matrix, "matrix");
    if (ctx.cfg.baseline) {
        const auto G = build_gaussian(ctx.matrix.rows(), ctx.matrix.cols(), derive_seed(ctx.cfg.seed, 0x6a));
        const auto r = one(G, "gaussian");
        dat.columns.insert(dat.columns.end(), {"gaussian_mean", "gaussian_std"});
        for (std::size_t i = 0; i < r.summary.size(); ++i)
            dat.rows[i].insert(dat.rows[i].end(), {num(r.summary[i].mean), num(r.summary[i].std)});
    }
    ctx.out.table(sum);
    ctx.out.table(rows);
    ctx.out.dat(dat);
}

struct TrialSignal {
    SparseSignal head;              // the k significant entries
    std::vector<Complex> full;      // dense signal including any tail; empty when there is none
    Measurement meas;
};

TrialSignal make_trial(const ExperimentConfig& cfg, const SensingMatrix& M, std::size_t k, std::uint64_t seed) {
    TrialSignal ts;
    ts.head = sample_signal(M.cols(), k, cfg.values, derive_seed(seed, 0));
    if (cfg.sigma_tail > 0) {
        ts.full.assign(M.cols(), Complex{});
        Rng rng(derive_seed(seed, 3));
        for (auto& z : ts.full) {
            const double re = rng.normal();
            z = cfg.sigma_tail * Complex(re, rng.normal());
        }
        for (const auto& [j, v] : ts.head.entries()) ts.full[j] += v;
        ts.meas = measure_dense(M, ts.full, cfg.noise, derive_seed(seed, 1));
    } else {
        ts.meas = measure(M, ts.head, cfg.noise, derive_seed(seed, 1));
    }
    return ts;
}

// Distance between the estimate and the signal, plus the best k-term tail of the signal.
std::pair<double, double> trial_error(const TrialSignal& ts, const SparseSignal& est, std::size_t k) {
    if (ts.full.empty()) return {SparseSignal::distance(ts.head, est), 0.0};
    double err = 0.0;
    std::vector<double> mags;
    mags.reserve(ts.full.size());
    for (std::uint64_t j = 0; j < ts.full.size(); ++j) {
        err += std::norm(ts.full[j] - est.at(j));
        mags.push_back(std::norm(ts.full[j]));
    }
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(), std::greater<>());
    double tail = 0.0;
    for (std::size_t i = k; i < mags.size(); ++i) tail += mags[i];
    return {std::sqrt(err), std::sqrt(tail)};
}

bool trial_success(const ExperimentConfig& cfg, const TrialSignal& ts, const SparseSignal& est) {
    if (cfg.noise.kind == NoiseKind::None && cfg.sigma_tail == 0) return recovery_matches(ts.head, est, 1e-6);
    return est.indices() == ts.head.indices();
}

void run_recon(RunContext& ctx) {
    const std::size_t k = ctx.cfg.ks.front();
    ReconOptions opt = ctx.cfg.recon;
    opt.k_max = k;
    const auto ts = make_trial(ctx.cfg, ctx.matrix, k, ctx.cfg.seed);
    const auto res = quadratic_reconstruct(ctx.matrix, ts.meas.f, opt);
    const auto [err, tail] = trial_error(ts, res.estimate, k);
    const bool ok = trial_success(ctx.cfg, ts, res.estimate);
    json j = res.to_json();
    json truth = json::array();
    for (const auto& [idx, v] : ts.head.entries()) truth.push_back({{"index", idx}, {"re", v.real()}, {"im", v.imag()}});
    j["truth"] = truth;
    j["success"] = ok;
    j["error"] = err;
    j["noise_norm"] = ts.meas.noise_norm;
    if (ctx.cfg.sigma_tail > 0 || ctx.cfg.noise.kind != NoiseKind::None) {
        j["tail_norm"] = tail;
        j["error_bound"] = error_bound(tail, ts.meas.noise_norm, ctx.cfg.epsilon);
    }
    ctx.out.write("recon.json", j.dump(2) + "\n");
    Table t{"recon_iterations", {"iteration", "column", "p_coeffs", "b", "beta_re", "beta_im", "residual_before",
                                 "residual_after", "restored"}, {}};
    for (const auto& l : res.log)
        t.rows.push_back({num(std::uint64_t{l.iteration}), num(l.column), num(l.p_coeffs), num(l.b), num(l.beta.real()),
                          num(l.beta.imag()), num(l.residual_before), num(l.residual_after), num(l.restored)});
    ctx.out.table(t);
    ctx.summary["success"] = ok;
    ctx.summary["error"] = err;
    ctx.summary["stop_reason"] = res.stop_reason;
}

void run_recon_sweep(RunContext& ctx) {
    if (!is_dg(ctx.matrix)) throw ConfigError("matrix.family", "recon-sweep needs a Delsarte-Goethals matrix");
    struct Out {
        bool success = false;
        double error = 0.0;
        double seconds = 0.0;
        std::size_t iterations = 0;
    };
    const auto& ks = ctx.cfg.ks;
    const std::size_t T = ctx.cfg.trials;
    std::vector<Out> results(ks.size() * T);
    parallel_for(results.size(), ctx.cfg.threads, [&](std::size_t i) {
        const std::size_t k = ks[i / T], t = i % T;
        const auto start = std::chrono::steady_clock::now();
        ReconOptions opt = ctx.cfg.recon;
        opt.k_max = k;
        const auto ts = make_trial(ctx.cfg, ctx.matrix, k, derive_seed(ctx.cfg.seed, k, t));
        const auto res = quadratic_reconstruct(ctx.matrix, ts.meas.f, opt);
        results[i].success = trial_success(ctx.cfg, ts, res.estimate);
        results[i].error = trial_error(ts, res.estimate, k).first;
        results[i].iterations = res.log.size();
        results[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });
    const std::string m = std::to_string(ctx.matrix.dg_set()->m());
    Table sweep{"recon_sweep", {"m", "k", "trial", "success", "error", "iterations"}, {}};
    Table timing{"recon_timing", {"m", "k", "trial", "wall_time"}, {}};
    Table sum{"recon_summary", {"m", "k", "trials", "successes", "rate"}, {}};
    Table dat{"recon_sweep", {"k", "successes", "rate"}, {}};
    json rows = json::array();
    for (std::size_t a = 0; a < ks.size(); ++a) {
        std::uint64_t wins = 0;
        for (std::size_t t = 0; t < T; ++t) {
            const auto& r = results[a * T + t];
            wins += r.success;
            sweep.rows.push_back({m, num(std::uint64_t{ks[a]}), num(std::uint64_t{t}), num(r.success), num(r.error),
                                  num(std::uint64_t{r.iterations})});
            timing.rows.push_back({m, num(std::uint64_t{ks[a]}), num(std::uint64_t{t}), num(r.seconds)});
        }
        const double rate = T ? static_cast<double>(wins) / static_cast<double>(T) : 0.0;
        sum.rows.push_back({m, num(std::uint64_t{ks[a]}), num(std::uint64_t{T}), num(wins), num(rate)});
        dat.rows.push_back({num(std::uint64_t{ks[a]}), num(wins), num(rate)});
        rows.push_back({{"k", ks[a]}, {"successes", wins}, {"rate", rate}});
    }
    ctx.summary["rows"] = rows;
    ctx.out.table(sum);
    ctx.out.table(sweep);
    ctx.out.table(timing);
    ctx.out.dat(dat);
}

void run_mcdiarmid(RunContext& ctx) {
    const auto& M = ctx.matrix;
    const std::size_t k = ctx.cfg.ks.front();
    const double N = static_cast<double>(M.rows());
    TupleFunction fn;
    std::vector<double> c(k);
    std::uint64_t ground = M.cols();
    std::vector<Complex> values;
    if (ctx.cfg.mcdiarmid_fn == "coordinate_sum") {
        const std::uint64_t seed = ctx.cfg.seed;
        fn = [seed](std::span<const std::uint64_t> t) {
            double s = 0.0;
            for (auto j : t) s += (derive_seed(seed, j) & 1u) ? 1.0 : -1.0;
            return s;
        };
        std::fill(c.begin(), c.end(), 2.0);
    } else if (ctx.cfg.mcdiarmid_fn == "energy") {
        const double eta = matrix_eta(M);
        Rng rng(derive_seed(ctx.cfg.seed, 5));
        values = sample_values(k, ctx.cfg.values, rng);
        double l1 = 0.0;
        for (const auto& v : values) l1 += std::abs(v);
        for (std::size_t i = 0; i < k; ++i)
            c[i] = 4.0 * std::pow(N, -eta / 2.0) * std::abs(values[i]) * (l1 - std::abs(values[i]));
        fn = [&M, values, N](std::span<const std::uint64_t> t) {
            double s = 0.0;
            for (const auto& z : M.apply_sparse(t, values)) s += std::norm(z);
            return s / N;
        };
    } else {
        const double eta = matrix_eta(M);
        // Coherence with the identity column; the ground set skips it.
        ground = M.cols() - 1;
        const auto sums = M.column_sums();
        std::fill(c.begin(), c.end(), std::pow(N, -eta));
        fn = [sums, N](std::span<const std::uint64_t> t) {
            double s = 0.0;
            for (auto j : t) s += std::norm(sums[j + 1]);
            return s / (N * N);
        };
    }
    double sc = 0.0;
    for (double v : c) sc += v * v;
    std::vector<double> gammas;
    for (double s : {0.5, 0.75, 1.0, 1.25, 1.5}) gammas.push_back(s * std::sqrt(sc));
    const auto rep = mcdiarmid_empirical(fn, ground, k, c, gammas, ctx.cfg.trials, ctx.cfg.seed, 2000, ctx.cfg.threads);
    ctx.pass = rep.pass;
    Table t{"mcdiarmid", {"fn", "gamma", "empirical", "bound", "sigma", "pass"}, {}};
    for (const auto& te : rep.tails)
        t.rows.push_back({ctx.cfg.mcdiarmid_fn, num(te.gamma), num(te.empirical), num(te.bound), num(te.sigma), num(te.pass)});
    ctx.summary["mean"] = rep.mean;
    ctx.summary["max_probe_ratio"] = rep.max_probe_ratio;
    ctx.out.table(t);
}

void run_noise(RunContext& ctx) {
    const auto& M = ctx.matrix;
    if (ctx.cfg.noise.kind != NoiseKind::MeasurementGaussian || !(ctx.cfg.noise.sigma > 0))
        throw ConfigError("noise", "the noise experiment needs measurement_gaussian noise with sigma > 0");
    const double N = static_cast<double>(M.rows()), C = static_cast<double>(M.cols());
    const double eta = matrix_eta(M);
    const double eps = ctx.cfg.epsilon, gamma = ctx.cfg.gamma, sigma = ctx.cfg.noise.sigma;
    Table t{"noise", {"k", "epsilon", "gamma", "sigma", "violation_rate", "bound", "binomial_sigma", "pass"}, {}};
    for (auto k : ctx.cfg.ks) {
        const auto d = strip_delta(N, C, static_cast<double>(k), eps, eta);
        std::vector<char> viol(ctx.cfg.trials);
        std::vector<double> prob(ctx.cfg.trials);
        parallel_for(ctx.cfg.trials, ctx.cfg.threads, [&](std::size_t i) {
            const std::uint64_t s = derive_seed(ctx.cfg.seed, k, i);
            const auto alpha = sample_signal(M.cols(), k, ctx.cfg.values, derive_seed(s, 0));
            const auto me = measure(M, alpha, ctx.cfg.noise, derive_seed(s, 1));
            double f2 = 0.0;
            for (const auto& z : me.f) f2 += std::norm(z);
            const double a = alpha.norm();
            const double lo = (1 - eps - gamma) * (1 - eps - gamma) * a * a, hi = (1 + eps + gamma) * (1 + eps + gamma) * a * a;
            viol[i] = f2 < lo || f2 > hi;
            prob[i] = 2.0 * (d.value + gaussian_tail_S(gamma * a / sigma, 2.0 * N));
        });
        double rate = 0.0, bound = 0.0;
        for (std::size_t i = 0; i < ctx.cfg.trials; ++i) {
            rate += viol[i];
            bound += prob[i];
        }
        rate /= static_cast<double>(ctx.cfg.trials);
        bound /= static_cast<double>(ctx.cfg.trials);
        const double sig = binomial_sigma(bound, ctx.cfg.trials);
        const bool ok = bound >= 1.0 || rate <= bound + 3.0 * sig;
        ctx.pass = ctx.pass && ok;
        t.rows.push_back({num(std::uint64_t{k}), num(eps), num(gamma), num(sigma), num(rate), num(bound), num(sig), num(ok)});
    }
    ctx.summary["eta"] = eta;
    ctx.out.table(t);
}

void run_bounds(RunContext& ctx) {
    const auto& M = ctx.matrix;
    const double N = static_cast<double>(M.rows()), C = static_cast<double>(M.cols());
    const double eta = matrix_eta(M);
    Table t{"bounds", {"N", "C", "k", "epsilon", "eta", "delta", "vacuous", "coherence_mean", "coherence_threshold"}, {}};
    json rows = json::array();
    for (auto k : ctx.cfg.ks) {
        const auto r = bound_report(N, C, static_cast<double>(k), ctx.cfg.epsilon, eta);
        rows.push_back(r.to_json());
        t.rows.push_back({num(N), num(C), num(std::uint64_t{k}), num(ctx.cfg.epsilon), num(eta), num(r.delta.value),
                          num(r.delta.vacuous), num(r.coherence_mean), num(r.coherence_tail)});
    }
    ctx.summary["rows"] = rows;
    ctx.out.table(t);
}

} // namespace

std::string experiment_kind_name(ExperimentKind k) { return kKindNames[static_cast<int>(k)]; }

ExperimentKind parse_experiment_kind(const std::string& s) {
    for (int i = 0; i < 9; ++i)
        if (s == kKindNames[i]) return static_cast<ExperimentKind>(i);
    throw ConfigError("kind", "unknown experiment '" + s + "'");
}

std::string tool_version() { return STRIPCS_VERSION; }

std::vector<std::size_t> parse_k_range(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string part;
    auto to_n = [&](const std::string& s) -> std::size_t {
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || s.front() == '-') throw ConfigError("k", "cannot parse '" + text + "'");
        return static_cast<std::size_t>(v);
    };
    while (std::getline(ss, part, ',')) {
        const auto dots = part.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_n(part));
            continue;
        }
        std::string hi = part.substr(dots + 2);
        std::size_t step = 1;
        if (const auto colon = hi.find(':'); colon != std::string::npos) {
            step = to_n(hi.substr(colon + 1));
            hi = hi.substr(0, colon);
        }
        const std::size_t a = to_n(part.substr(0, dots)), b = to_n(hi);
        if (step == 0 || a > b) throw ConfigError("k", "empty range '" + part + "'");
        for (std::size_t k = a; k <= b; k += step) out.push_back(k);
    }
    if (out.empty()) throw ConfigError("k", "no values");
    return out;
}

json ExperimentConfig::to_json() const {
    return json{{"kind", experiment_kind_name(kind)},
                {"matrix", matrix.to_json()},
                {"k", ks},
                {"epsilon", epsilon},
                {"trials", trials},
                {"seed", seed},
                {"threads", threads},
                {"out", out},
                {"format", format},
                {"values", value_model_name(values)},
                {"noise", {{"kind", noise_kind_name(noise.kind)}, {"sigma", noise.sigma}}},
                {"sigma_tail", sigma_tail},
                {"gamma", gamma},
                {"certify_mode", certify_mode},
                {"w_policy", w_policy},
                {"baseline", baseline},
                {"mcdiarmid_fn", mcdiarmid_fn},
                {"recon", recon.to_json()}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config", "expected an object");
    static const std::set<std::string> known{"kind", "matrix", "k", "epsilon", "trials", "seed", "threads", "out",
                                             "format", "values", "noise", "sigma_tail", "gamma", "certify_mode",
                                             "w_policy", "baseline", "mcdiarmid_fn", "recon"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key())) throw ConfigError(it.key(), "unknown field");
    ExperimentConfig c;
    if (!j.contains("kind")) throw ConfigError("kind", "missing");
    c.kind = parse_experiment_kind(get_field<std::string>(j, "kind", "", ""));
    if (!j.contains("matrix")) throw ConfigError("matrix", "missing");
    try {
        c.matrix = MatrixSpec::from_json(j.at("matrix"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        const auto colon = msg.find(':');
        throw ConfigError(colon == std::string::npos ? "matrix" : msg.substr(0, colon),
                          colon == std::string::npos ? msg : msg.substr(colon + 2));
    }
    if (j.contains("k")) {
        const auto& kj = j.at("k");
        if (kj.is_string()) c.ks = parse_k_range(kj.get<std::string>());
        else if (kj.is_number_integer()) {
            if (kj.get<std::int64_t>() < 0) throw ConfigError("k", "must be positive");
            c.ks = {kj.get<std::size_t>()};
        }
        else if (kj.is_array()) {
            c.ks.clear();
            for (std::size_t i = 0; i < kj.size(); ++i) {
                if (!kj[i].is_number_integer() || kj[i].get<std::int64_t>() < 0) throw ConfigError("k[" + std::to_string(i) + "]", "expected a positive integer");
                c.ks.push_back(kj[i].get<std::size_t>());
            }
        } else
            throw ConfigError("k", "expected an integer, a list or a range string");
    }
    c.epsilon = get_field(j, "epsilon", "", c.epsilon);
    c.trials = get_field(j, "trials", "", c.trials);
    c.seed = get_field(j, "seed", "", c.seed);
    c.threads = get_field(j, "threads", "", c.threads);
    c.out = get_field(j, "out", "", c.out);
    c.format = get_field(j, "format", "", c.format);
    if (j.contains("values")) {
        try {
            c.values = parse_value_model(get_field<std::string>(j, "values", "", ""));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError("values", e.what());
        }
    }
    if (j.contains("noise")) {
        const auto& nj = j.at("noise");
        if (!nj.is_object()) throw ConfigError("noise", "expected an object");
        try {
            c.noise.kind = parse_noise_kind(get_field<std::string>(nj, "kind", "noise.", "none"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError("noise.kind", e.what());
        }
        c.noise.sigma = get_field(nj, "sigma", "noise.", 0.0);
    }
    c.sigma_tail = get_field(j, "sigma_tail", "", c.sigma_tail);
    c.gamma = get_field(j, "gamma", "", c.gamma);
    c.certify_mode = get_field(j, "certify_mode", "", c.certify_mode);
    c.w_policy = get_field(j, "w_policy", "", c.w_policy);
    c.baseline = get_field(j, "baseline", "", c.baseline);
    c.mcdiarmid_fn = get_field(j, "mcdiarmid_fn", "", c.mcdiarmid_fn);
    if (j.contains("recon")) {
        if (!j.at("recon").is_object()) throw ConfigError("recon", "expected an object");
        try {
            c.recon = ReconOptions::from_json(j.at("recon"));
        } catch (const json::exception& e) {
            throw ConfigError("recon", e.what());
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(':');
            throw ConfigError(msg.substr(0, colon), colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const {
    check_params(matrix);
    if (ks.empty()) throw ConfigError("k", "no values");
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] == 0) throw ConfigError("k[" + std::to_string(i) + "]", "must be at least 1");
    if (!(epsilon > 0) || !(epsilon < 1)) throw ConfigError("epsilon", "must lie in (0, 1)");
    if (trials == 0 && kind != ExperimentKind::Certify && kind != ExperimentKind::Bounds &&
        kind != ExperimentKind::Recon)
        throw ConfigError("trials", "must be positive");
    if (format != "csv" && format != "json") throw ConfigError("format", "expected csv or json");
    if (out.empty()) throw ConfigError("out", "must not be empty");
    if (!(noise.sigma >= 0)) throw ConfigError("noise.sigma", "must be non-negative");
    if (!(sigma_tail >= 0)) throw ConfigError("sigma_tail", "must be non-negative");
    if (!(gamma >= 0)) throw ConfigError("gamma", "must be non-negative");
    if (certify_mode != "exhaustive" && certify_mode != "sampled")
        throw ConfigError("certify_mode", "expected exhaustive or sampled");
    if (w_policy != "fixed" && w_policy != "all") throw ConfigError("w_policy", "expected fixed or all");
    if (mcdiarmid_fn != "coordinate_sum" && mcdiarmid_fn != "energy" && mcdiarmid_fn != "coherence")
        throw ConfigError("mcdiarmid_fn", "expected coordinate_sum, energy or coherence");
    if ((kind == ExperimentKind::Recon || kind == ExperimentKind::ReconSweep) &&
        matrix.family != Family::DelsarteGoethals && matrix.family != Family::SecondOrderRM)
        throw ConfigError("matrix.family", "reconstruction needs dg or rm2");
    if (matrix.params.contains("subsample") &&
        (kind == ExperimentKind::Recon || kind == ExperimentKind::ReconSweep))
        throw ConfigError("matrix.params.subsample", "reconstruction needs the full column set");
}

std::string ExperimentConfig::hash() const {
    json j = to_json();
    j.erase("out");
    j.erase("threads");
    j.erase("format");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentRecord run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    rec.config_hash = config.hash();
    SensingMatrix matrix = [&] {
        try {
            return build_from_spec(config.matrix);
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(": ");
            if (colon == std::string::npos) throw ConfigError("matrix", msg);
            const std::string field = msg.substr(0, colon);
            throw ConfigError(field.rfind("params.", 0) == 0 ? "matrix." + field : "matrix",
                              field.rfind("params.", 0) == 0 ? msg.substr(colon + 2) : msg);
        }
    }();
    OutputSet out(config, rec.config_hash);
    json summary;
    RunContext ctx{config, matrix, out, summary};
    switch (config.kind) {
    case ExperimentKind::Certify: run_certify(ctx); break;
    case ExperimentKind::Strip: run_strip(ctx); break;
    case ExperimentKind::Coherence: run_coherence(ctx); break;
    case ExperimentKind::Condition: run_condition(ctx); break;
    case ExperimentKind::Recon: run_recon(ctx); break;
    case ExperimentKind::ReconSweep: run_recon_sweep(ctx); break;
    case ExperimentKind::McDiarmid: run_mcdiarmid(ctx); break;
    case ExperimentKind::Noise: run_noise(ctx); break;
    case ExperimentKind::Bounds: run_bounds(ctx); break;
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.pass = ctx.pass;
    rec.summary = json{{"config", config.to_json()},
                       {"config_hash", rec.config_hash},
                       {"tool_version", tool_version()},
                       {"matrix", matrix.spec().describe()},
                       {"N", matrix.rows()},
                       {"C", matrix.cols()},
                       {"pass", rec.pass},
                       {"wall_time", rec.wall_time},
                       {"results", summary}};
    out.write("summary.json", rec.summary.dump(2) + "\n");
    rec.files = out.files();
    rec.display = out.display();
    out.commit();
    return rec;
}

} // namespace stripcs
