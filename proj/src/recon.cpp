#include "stripcs/recon.hpp"

#include "stripcs/concentration.hpp"
#include "stripcs/parallel.hpp"
#include "stripcs/rng.hpp"
#include "stripcs/wht.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace stripcs {

using nlohmann::json;

std::string noise_kind_name(NoiseKind k) {
    switch (k) {
    case NoiseKind::None: return "none";
    case NoiseKind::MeasurementGaussian: return "measurement_gaussian";
    case NoiseKind::SignalGaussian: return "signal_gaussian";
    }
    return "unknown";
}

NoiseKind parse_noise_kind(const std::string& s) {
    if (s == "none") return NoiseKind::None;
    if (s == "measurement_gaussian" || s == "measurement") return NoiseKind::MeasurementGaussian;
    if (s == "signal_gaussian" || s == "signal") return NoiseKind::SignalGaussian;
    throw std::invalid_argument("noise: unknown noise model '" + s + "'");
}

namespace {

void add_noise(const SensingMatrix& matrix, Measurement& out, NoiseModel noise, std::uint64_t seed) {
    const std::size_t N = matrix.rows();
    out.noise = noise;
    out.nu.assign(N, Complex{});
    if (noise.kind == NoiseKind::None) return;
    if (!(noise.sigma >= 0)) throw std::invalid_argument("noise.sigma: must be non-negative");
    if (noise.kind == NoiseKind::MeasurementGaussian) {
        Rng rng(derive_seed(seed, 1));
        for (auto& z : out.nu) {
            const double re = rng.normal();
            z = noise.sigma * Complex(re, rng.normal());
        }
    } else {
        Rng rng(derive_seed(seed, 2));
        std::vector<Complex> mu(matrix.cols());
        for (auto& z : mu) {
            const double re = rng.normal();
            z = noise.sigma * Complex(re, rng.normal());
        }
        out.nu = matrix.apply(mu);
        const double s = 1.0 / std::sqrt(static_cast<double>(N));
        for (auto& z : out.nu) z *= s;
    }
    double nn = 0.0;
    for (std::size_t x = 0; x < N; ++x) {
        out.f[x] += out.nu[x];
        nn += std::norm(out.nu[x]);
    }
    out.noise_norm = std::sqrt(nn);
}

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

} // namespace

Measurement measure(const SensingMatrix& matrix, const SparseSignal& alpha, NoiseModel noise, std::uint64_t seed) {
    if (alpha.ambient() != matrix.cols()) throw std::invalid_argument("measure: signal dimension does not match C");
    Measurement out;
    out.f = matrix.apply_sparse(alpha.indices(), alpha.values());
    const double s = 1.0 / std::sqrt(static_cast<double>(matrix.rows()));
    for (auto& z : out.f) z *= s;
    add_noise(matrix, out, noise, seed);
    return out;
}

Measurement measure_dense(const SensingMatrix& matrix, std::span<const Complex> coeffs, NoiseModel noise,
                          std::uint64_t seed) {
    Measurement out;
    out.f = matrix.apply(coeffs);
    const double s = 1.0 / std::sqrt(static_cast<double>(matrix.rows()));
    for (auto& z : out.f) z *= s;
    add_noise(matrix, out, noise, seed);
    return out;
}

std::vector<Complex> shift_multiply(std::span<const Complex> f, const BinaryVector& a) {
    const std::size_t n = f.size();
    if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("shift_multiply: length must be a power of two");
    if (std::size_t{1} << a.size() != n) throw std::invalid_argument("shift_multiply: offset length must be log2(N)");
    std::vector<Complex> g(n);
    for (std::size_t x = 0; x < n; ++x) g[x] = f[x ^ a.bits()] * std::conj(f[x]);
    return g;
}

json ReconOptions::to_json() const {
    return json{{"k_max", k_max},
                {"max_iterations", max_iterations},
                {"stop_eps", stop_eps},
                {"offsets", offsets == OffsetSet::Unit ? "unit" : "all"},
                {"association", association == Association::Peaks ? "peaks" : "score"},
                {"search_width", search_width},
                {"refit", refit == Refit::None ? "none" : refit == Refit::Final ? "final" : "every"}};
}

ReconOptions ReconOptions::from_json(const json& j, ReconOptions o) {
    auto str = [&](const char* key) { return j.at(key).get<std::string>(); };
    if (j.contains("k_max")) o.k_max = j.at("k_max").get<std::size_t>();
    if (j.contains("max_iterations")) o.max_iterations = j.at("max_iterations").get<std::size_t>();
    if (j.contains("stop_eps")) o.stop_eps = j.at("stop_eps").get<double>();
    if (j.contains("search_width")) o.search_width = j.at("search_width").get<std::size_t>();
    if (j.contains("offsets")) {
        const auto s = str("offsets");
        if (s == "unit") o.offsets = OffsetSet::Unit;
        else if (s == "all") o.offsets = OffsetSet::All;
        else throw std::invalid_argument("recon.offsets: expected 'unit' or 'all'");
    }
    if (j.contains("association")) {
        const auto s = str("association");
        if (s == "peaks") o.association = Association::Peaks;
        else if (s == "score") o.association = Association::Score;
        else throw std::invalid_argument("recon.association: expected 'peaks' or 'score'");
    }
    if (j.contains("refit")) {
        const auto s = str("refit");
        if (s == "none") o.refit = Refit::None;
        else if (s == "final") o.refit = Refit::Final;
        else if (s == "every") o.refit = Refit::Every;
        else throw std::invalid_argument("recon.refit: expected 'none', 'final' or 'every'");
    }
    return o;
}

json ReconResult::to_json() const {
    json j;
    json est = json::array();
    for (const auto& [idx, v] : estimate.entries()) est.push_back({{"index", idx}, {"re", v.real()}, {"im", v.imag()}});
    j["estimate"] = est;
    json it = json::array();
    for (const auto& l : log)
        it.push_back({{"iteration", l.iteration}, {"column", l.column}, {"p", l.p_coeffs}, {"b", l.b},
                      {"beta_re", l.beta.real()}, {"beta_im", l.beta.imag()},
                      {"residual_before", l.residual_before}, {"residual_after", l.residual_after},
                      {"restored", l.restored}});
    j["iterations"] = it;
    j["residual_norm"] = residual_norm;
    j["stop_reason"] = stop_reason;
    return j;
}

namespace {

/// Least-squares coefficients of f on the given columns; nullopt if the Gram matrix is singular.
std::optional<std::vector<Complex>> refit_values(const SensingMatrix& matrix, std::span<const Complex> f,
                                                 const std::vector<std::uint64_t>& support) {
    const std::size_t k = support.size();
    const std::size_t N = matrix.rows();
    const double sn = std::sqrt(static_cast<double>(N));
    std::vector<std::vector<Complex>> cols;
    for (auto j : support) cols.push_back(matrix.column(j));
    ComplexMatrix G(k, k);
    std::vector<Complex> rhs(k);
    for (std::size_t a = 0; a < k; ++a) {
        Complex r = 0.0;
        for (std::size_t x = 0; x < N; ++x) r += std::conj(cols[a][x]) * f[x];
        rhs[a] = r / sn;
        for (std::size_t b = a; b < k; ++b) {
            Complex g = 0.0;
            for (std::size_t x = 0; x < N; ++x) g += std::conj(cols[a][x]) * cols[b][x];
            G(a, b) = g / static_cast<double>(N);
            G(b, a) = std::conj(G(a, b));
        }
    }
    return solve_linear(G, rhs, 1e-10);
}

void residual_from(const SensingMatrix& matrix, std::span<const Complex> f, const std::map<std::uint64_t, Complex>& coef,
                   std::vector<Complex>& r) {
    const std::size_t N = matrix.rows();
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    r.assign(f.begin(), f.end());
    std::vector<Complex> col(N);
    for (const auto& [j, v] : coef) {
        matrix.column_into(j, col);
        for (std::size_t x = 0; x < N; ++x) r[x] -= s * v * col[x];
    }
}

void apply_refit(const SensingMatrix& matrix, std::span<const Complex> f, std::map<std::uint64_t, Complex>& coef) {
    std::vector<std::uint64_t> support;
    for (const auto& e : coef) support.push_back(e.first);
    if (support.empty()) return;
    const auto z = refit_values(matrix, f, support);
    if (!z) return;
    for (std::size_t i = 0; i < support.size(); ++i) coef[support[i]] = (*z)[i];
}

} // namespace

ReconResult quadratic_reconstruct(const SensingMatrix& matrix, std::span<const Complex> f, const ReconOptions& opt) {
    const DGSet* set = matrix.dg_set();
    if (!set) throw std::invalid_argument("quadratic_reconstruct: needs a Delsarte-Goethals matrix");
    if (opt.k_max < 1) throw std::invalid_argument("quadratic_reconstruct: k_max must be at least 1");
    if (f.size() != matrix.rows()) throw std::invalid_argument("quadratic_reconstruct: measurement length must equal N");
    const int m = set->m();
    const std::size_t N = matrix.rows();
    const int dim = set->dimension();
    const double sn = std::sqrt(static_cast<double>(N));
    const std::size_t max_iter = opt.max_iterations ? opt.max_iterations : 2 * opt.k_max;

    ReconResult res;
    const double fnorm = norm2(f);
    const double stop = opt.stop_eps >= 0 ? opt.stop_eps : 1e-6 * fnorm;
    res.estimate = SparseSignal(matrix.cols(), {});
    if (fnorm == 0.0) {
        res.stop_reason = "zero measurement";
        return res;
    }

    // Offsets and, for each offset a and generator g, the row vector a G_g.
    std::vector<std::uint64_t> offsets;
    const bool use_all = opt.offsets == OffsetSet::All && opt.association == Association::Score;
    if (use_all)
        for (std::uint64_t a = 1; a < N; ++a) offsets.push_back(a);
    else
        for (int i = 0; i < m; ++i) offsets.push_back(std::uint64_t{1} << i);
    const std::size_t A = offsets.size();
    if (opt.association == Association::Score &&
        static_cast<double>(A) * static_cast<double>(set->size()) > static_cast<double>(std::uint64_t{1} << 30))
        throw std::invalid_argument("quadratic_reconstruct: score association too large for this matrix set; use peaks");
    std::vector<std::uint64_t> aG(A * static_cast<std::size_t>(dim));
    for (std::size_t ai = 0; ai < A; ++ai)
        for (int g = 0; g < dim; ++g)
            aG[ai * static_cast<std::size_t>(dim) + static_cast<std::size_t>(g)] =
                set->generators()[static_cast<std::size_t>(g)].left_multiply(BinaryVector(offsets[ai], m)).bits();

    std::vector<Complex> r(f.begin(), f.end());
    std::map<std::uint64_t, Complex> coef;
    std::vector<double> mag2(A * N);
    std::vector<Complex> g(N), base(N), h(N);

    for (std::size_t it = 0;; ++it) {
        const double rn = norm2(r);
        if (rn < stop) {
            res.stop_reason = "converged";
            break;
        }
        if (it >= max_iter) {
            res.stop_reason = "iteration limit";
            break;
        }
        for (std::size_t ai = 0; ai < A; ++ai) {
            const std::uint64_t a = offsets[ai];
            for (std::size_t x = 0; x < N; ++x) g[x] = r[x ^ a] * std::conj(r[x]);
            fwht(std::span<Complex>(g));
            for (std::size_t l = 0; l < N; ++l) mag2[ai * N + l] = std::norm(g[l]);
        }

        std::optional<std::uint64_t> coeffs;
        if (opt.association == Association::Score) {
            std::vector<std::uint64_t> v(A, 0);
            auto score = [&] {
                double s = 0.0;
                for (std::size_t ai = 0; ai < A; ++ai) s += mag2[ai * N + v[ai]];
                return s;
            };
            double best = score();
            std::uint64_t best_c = 0, c = 0;
            for (std::uint64_t i = 1; i < set->size(); ++i) {
                const int gbit = std::countr_zero(i);
                c ^= std::uint64_t{1} << gbit;
                for (std::size_t ai = 0; ai < A; ++ai) v[ai] ^= aG[ai * static_cast<std::size_t>(dim) + static_cast<std::size_t>(gbit)];
                const double s = score();
                if (s > best) {
                    best = s;
                    best_c = c;
                }
            }
            if (best > 0.0) coeffs = best_c;
        } else {
            // Row i of P is one of the strongest peaks for offset e_i. Search the
            // combinations depth first, strongest first, pruning on symmetry.
            const std::size_t w = std::max<std::size_t>(1, std::min(opt.search_width, N));
            std::vector<std::vector<std::uint64_t>> top(static_cast<std::size_t>(m));
            std::vector<std::uint64_t> idx(N);
            for (int i = 0; i < m; ++i) {
                for (std::size_t l = 0; l < N; ++l) idx[l] = l;
                const double* row = &mag2[static_cast<std::size_t>(i) * N];
                std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(w), idx.end(),
                                  [&](std::uint64_t a, std::uint64_t b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
                top[static_cast<std::size_t>(i)].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(w));
            }
            std::uint64_t rows[64] = {};
            std::size_t budget = 1u << 16;
            auto dfs = [&](auto&& self, int i) -> bool {
                if (i == m) return (coeffs = set->coefficients_of_rows(rows)).has_value();
                for (auto cand : top[static_cast<std::size_t>(i)]) {
                    if (budget == 0) return false;
                    --budget;
                    bool consistent = true;
                    for (int j = 0; j < i && consistent; ++j) consistent = ((cand >> j) & 1u) == ((rows[j] >> i) & 1u);
                    if (!consistent) continue;
                    rows[i] = cand;
                    if (self(self, i + 1)) return true;
                }
                return false;
            };
            dfs(dfs, 0);
        }
        if (!coeffs) {
            res.stop_reason = "no valid candidate";
            break;
        }

        matrix.column_into(*coeffs << m, base);
        for (std::size_t x = 0; x < N; ++x) h[x] = r[x] * std::conj(base[x]);
        fwht(std::span<Complex>(h));
        std::uint64_t b = 0;
        for (std::uint64_t l = 1; l < N; ++l)
            if (std::norm(h[l]) > std::norm(h[b])) b = l;
        if (std::norm(h[b]) == 0.0) {
            res.stop_reason = "degenerate spectrum";
            break;
        }
        const std::uint64_t j = (*coeffs << m) | b;
        const Complex beta = ((std::popcount(b) & 1) ? -h[b] : h[b]) / sn;
        IterationLog entry;
        entry.iteration = it;
        entry.column = j;
        entry.p_coeffs = *coeffs;
        entry.b = b;
        entry.beta = beta;
        entry.residual_before = rn;
        entry.restored = coef.contains(j);
        coef[j] += beta;
        for (std::size_t x = 0; x < N; ++x) {
            const Complex phi = ((std::popcount(b) + std::popcount(b & x)) & 1) ? -base[x] : base[x];
            r[x] -= beta / sn * phi;
        }
        if (opt.refit == Refit::Every) {
            apply_refit(matrix, f, coef);
            residual_from(matrix, f, coef, r);
        }
        entry.residual_after = norm2(r);
        res.log.push_back(entry);
    }

    if (opt.refit != Refit::None && !coef.empty()) {
        if (coef.size() > opt.k_max) {
            std::vector<std::pair<double, std::uint64_t>> mags;
            for (const auto& [j, v] : coef) mags.emplace_back(-std::abs(v), j);
            std::sort(mags.begin(), mags.end());
            std::map<std::uint64_t, Complex> kept;
            for (std::size_t i = 0; i < opt.k_max; ++i) kept[mags[i].second] = coef[mags[i].second];
            coef.swap(kept);
        }
        apply_refit(matrix, f, coef);
        residual_from(matrix, f, coef, r);
    }
    std::vector<std::pair<std::uint64_t, Complex>> entries;
    for (const auto& [j, v] : coef)
        if (v != Complex{}) entries.emplace_back(j, v);
    res.estimate = SparseSignal(matrix.cols(), std::move(entries));
    res.residual_norm = norm2(r);
    return res;
}

bool recovery_matches(const SparseSignal& truth, const SparseSignal& estimate, double tol) {
    if (truth.k() != estimate.k() || truth.ambient() != estimate.ambient()) return false;
    for (std::size_t i = 0; i < truth.k(); ++i) {
        if (truth.entries()[i].first != estimate.entries()[i].first) return false;
        if (std::abs(truth.entries()[i].second - estimate.entries()[i].second) > tol) return false;
    }
    return true;
}

CrosstermReport crossterm_energy_check(const SensingMatrix& matrix, std::span<const Complex> values,
                                       const BinaryVector& a, std::size_t trials, std::uint64_t seed,
                                       unsigned threads) {
    const DGSet* set = matrix.dg_set();
    if (!set) throw std::invalid_argument("crossterm_energy_check: needs a Delsarte-Goethals matrix");
    if (trials == 0) throw std::invalid_argument("crossterm_energy_check: trials must be positive");
    const std::size_t N = matrix.rows();
    const std::size_t k = values.size();
    const int m = set->m();
    if (a.size() != m) throw std::invalid_argument("crossterm_energy_check: offset length must be m");

    CrosstermReport rep;
    double s1 = 0.0, s2 = 0.0;
    for (const auto& v : values) {
        s1 += std::norm(v);
        s2 += std::norm(v) * std::norm(v);
    }
    rep.target = s1 * s1 - s2;

    const std::size_t chunks = std::min<std::size_t>(64, trials);
    std::vector<std::vector<double>> sum(chunks, std::vector<double>(N, 0.0));
    std::vector<std::vector<std::uint64_t>> cnt(chunks, std::vector<std::uint64_t>(N, 0));
    std::vector<double> ratio_sum(chunks, 0.0);
    const DistinctTupleSampler sampler(matrix.cols(), k);
    const double sn = std::sqrt(static_cast<double>(N));
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::vector<std::uint64_t> support(k);
        std::vector<char> peak(N);
        for (std::size_t t = c; t < trials; t += chunks) {
            Rng rng(derive_seed(seed, t));
            sampler.sample_into(rng, support);
            auto fv = matrix.apply_sparse(support, values);
            for (auto& z : fv) z /= sn;
            auto g = shift_multiply(fv, a);
            fwht(std::span<Complex>(g));
            std::fill(peak.begin(), peak.end(), 0);
            for (auto j : support) {
                const BinarySymmetricMatrix P = set->matrix(j >> m);
                peak[P.left_multiply(a).bits()] = 1;
            }
            double tmax = 0.0, tsum = 0.0;
            std::size_t tn = 0;
            for (std::size_t l = 0; l < N; ++l) {
                if (peak[l]) continue;
                const double v = static_cast<double>(N) * std::norm(g[l]);
                sum[c][l] += v;
                ++cnt[c][l];
                tmax = std::max(tmax, v);
                tsum += v;
                ++tn;
            }
            if (tn && tsum > 0) ratio_sum[c] += tmax / (tsum / static_cast<double>(tn));
        }
    });
    rep.per_l.assign(N, 0.0);
    double total = 0.0, ratio = 0.0;
    std::uint64_t total_n = 0;
    for (std::size_t l = 0; l < N; ++l) {
        double s = 0.0;
        std::uint64_t n = 0;
        for (std::size_t c = 0; c < chunks; ++c) {
            s += sum[c][l];
            n += cnt[c][l];
        }
        total += s;
        total_n += n;
        rep.per_l[l] = n ? s / static_cast<double>(n) : 0.0;
    }
    for (double v : ratio_sum) ratio += v;
    rep.pooled_mean = total_n ? total / static_cast<double>(total_n) : 0.0;
    rep.mean_max_over_mean = ratio / static_cast<double>(trials);
    if (rep.target > 0)
        for (double v : rep.per_l) rep.max_relative_deviation = std::max(rep.max_relative_deviation, std::abs(v - rep.target) / rep.target);
    return rep;
}

double error_bound(double tail_norm, double nu_norm, double eps) {
    if (!(eps >= 0) || !(eps < 1)) throw std::invalid_argument("error_bound: eps must lie in [0, 1)");
    if (tail_norm < 0 || nu_norm < 0) throw std::invalid_argument("error_bound: norms must be non-negative");
    return (5.0 + eps) / (1.0 - eps) * tail_norm + 2.0 / (1.0 - eps) * nu_norm;
}

double error_bound(const SparseSignal& alpha, const SparseSignal& alpha_k, double nu_norm, double eps) {
    return error_bound(SparseSignal::distance(alpha, alpha_k), nu_norm, eps);
}

} // namespace stripcs
