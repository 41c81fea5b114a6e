#include "stripcs/stripcheck.hpp"

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

namespace {

constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 16;
constexpr std::uint64_t kHashLimit = std::uint64_t{1} << 22;
constexpr std::uint64_t kStoreLimit = std::uint64_t{1} << 22;

std::uint64_t quantized_hash(std::span<const Complex> v) {
    std::uint64_t h = 0x6A09E667F3BCC909ULL;
    for (const Complex& z : v) {
        const auto re = static_cast<std::int64_t>(std::llround(z.real() * 1e9));
        const auto im = static_cast<std::int64_t>(std::llround(z.imag() * 1e9));
        h = splitmix64(h ^ static_cast<std::uint64_t>(re));
        h = splitmix64(h ^ static_cast<std::uint64_t>(im));
    }
    return h;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// Column access that keeps every column in memory when the matrix is small enough.
class ColumnCache {
public:
    ColumnCache(const SensingMatrix& matrix, unsigned threads) : matrix_(matrix), n_(matrix.rows()) {
        if (static_cast<double>(matrix.cols()) * static_cast<double>(n_) <= static_cast<double>(kStoreLimit)) {
            data_.resize(matrix.cols() * n_);
            parallel_for(matrix.cols(), threads, [&](std::size_t j) {
                matrix_.column_into(j, std::span<Complex>(data_.data() + j * n_, n_));
            });
        }
    }

    /// Either a view into the cache or a freshly computed column in `scratch`.
    std::span<const Complex> get(std::uint64_t j, std::vector<Complex>& scratch) const {
        if (!data_.empty()) return {data_.data() + j * n_, n_};
        scratch.resize(n_);
        matrix_.column_into(j, scratch);
        return scratch;
    }

private:
    const SensingMatrix& matrix_;
    std::size_t n_;
    std::vector<Complex> data_;
};

struct HashIndex {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> entries;  // (hash, column), sorted

    std::optional<std::uint64_t> find(std::span<const Complex> v, const ColumnCache& cache, double tol,
                                      std::vector<Complex>& scratch) const {
        const std::uint64_t h = quantized_hash(v);
        auto it = std::lower_bound(entries.begin(), entries.end(), std::make_pair(h, std::uint64_t{0}));
        for (; it != entries.end() && it->first == h; ++it)
            if (max_abs_diff(v, cache.get(it->second, scratch)) <= tol) return it->second;
        return std::nullopt;
    }
};

std::vector<std::vector<std::uint64_t>> all_subsets(std::uint64_t n, std::size_t k) {
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> cur(k);
    for (std::size_t i = 0; i < k; ++i) cur[i] = i;
    if (k > n) return out;
    for (;;) {
        out.push_back(cur);
        std::size_t i = k;
        while (i > 0 && cur[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

} // namespace

std::string certify_mode_name(CertifyMode mode) { return mode == CertifyMode::Exhaustive ? "exhaustive" : "sampled"; }

json StripCertificate::to_json() const {
    json j;
    j["N"] = N;
    j["C"] = C;
    j["mode"] = certify_mode_name(mode);
    j["tol"] = tol;
    j["unimodular_pass"] = unimodular_pass;
    j["max_modulus_deviation"] = max_modulus_deviation;
    j["st1_row_orthogonality_pass"] = st1_row_orthogonality_pass;
    j["st1_max_row_inner"] = st1_max_row_inner;
    j["st1_row_pair_witness"] = st1_row_pair_witness ? json::array({st1_row_pair_witness->first, st1_row_pair_witness->second}) : json(nullptr);
    j["st1_row_sum_pass"] = st1_row_sum_pass;
    j["st1_max_row_sum"] = st1_max_row_sum;
    j["st1_row_sum_witness"] = st1_row_sum_witness ? json(*st1_row_sum_witness) : json(nullptr);
    j["st2_pass"] = st2_pass;
    j["st2_products_checked"] = st2_products_checked;
    j["st2_failure"] = st2_failure;
    j["st2_witness"] = st2_witness ? json::array({st2_witness->first, st2_witness->second}) : json(nullptr);
    j["st3_pass"] = st3_pass;
    j["st3_eta"] = st3_eta;
    j["max_column_sum_sq"] = max_column_sum_sq;
    j["st3_witness"] = st3_witness;
    json vals = json::array();
    for (const auto& [v, count] : column_sum_sq_values) vals.push_back({{"value", v}, {"count", count}});
    j["column_sum_sq_values"] = vals;
    j["all_pass"] = all_pass();
    return j;
}

StripCertificate certify(const SensingMatrix& matrix, const CertifyOptions& opt) {
    const std::size_t N = matrix.rows();
    const std::uint64_t C = matrix.cols();
    if (opt.mode == CertifyMode::Exhaustive && C > kExhaustiveLimit)
        throw std::invalid_argument("certify: exhaustive mode requires C <= 2^16");
    if (C > kHashLimit) throw std::invalid_argument("certify: C above 2^22 is not supported");
    if (!(opt.tol > 0)) throw std::invalid_argument("certify: tolerance must be positive");

    StripCertificate cert;
    cert.N = N;
    cert.C = C;
    cert.mode = opt.mode;
    cert.tol = opt.tol;
    const double Cd = static_cast<double>(C);
    const ColumnCache cache(matrix, opt.threads);

    // (St1): accumulate row sums and row inner products over all columns, in fixed chunks.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (opt.mode == CertifyMode::Exhaustive) {
        for (std::size_t x = 0; x < N; ++x)
            for (std::size_t y = x + 1; y < N; ++y) pairs.emplace_back(x, y);
    } else {
        Rng rng(derive_seed(opt.seed, 11));
        for (std::size_t s = 0; s < opt.row_pair_samples && N > 1; ++s) {
            const std::size_t x = rng.below(N);
            std::size_t y = rng.below(N - 1);
            if (y >= x) ++y;
            pairs.emplace_back(std::min(x, y), std::max(x, y));
        }
    }
    const std::uint64_t chunk = std::max<std::uint64_t>(256, (C + 63) / 64);
    const std::size_t chunks = static_cast<std::size_t>((C + chunk - 1) / chunk);
    std::vector<std::vector<Complex>> part_sums(chunks, std::vector<Complex>(N));
    std::vector<std::vector<Complex>> part_inner(chunks, std::vector<Complex>(pairs.size()));
    std::vector<double> part_mod(chunks, 0.0);
    parallel_for(chunks, opt.threads, [&](std::size_t c) {
        std::vector<Complex> scratch;
        auto& sums = part_sums[c];
        auto& inn = part_inner[c];
        for (std::uint64_t j = c * chunk; j < std::min<std::uint64_t>(C, (c + 1) * chunk); ++j) {
            const auto col = cache.get(j, scratch);
            for (std::size_t x = 0; x < N; ++x) {
                sums[x] += col[x];
                part_mod[c] = std::max(part_mod[c], std::abs(std::abs(col[x]) - 1.0));
            }
            for (std::size_t p = 0; p < pairs.size(); ++p) inn[p] += col[pairs[p].first] * std::conj(col[pairs[p].second]);
        }
    });
    std::vector<Complex> row_sums(N);
    std::vector<Complex> row_inner(pairs.size());
    for (std::size_t c = 0; c < chunks; ++c) {
        for (std::size_t x = 0; x < N; ++x) row_sums[x] += part_sums[c][x];
        for (std::size_t p = 0; p < pairs.size(); ++p) row_inner[p] += part_inner[c][p];
        cert.max_modulus_deviation = std::max(cert.max_modulus_deviation, part_mod[c]);
    }
    cert.unimodular_pass = cert.max_modulus_deviation <= 1e-12;
    for (std::size_t x = 0; x < N; ++x) {
        const double v = std::abs(row_sums[x]) / Cd;
        if (!cert.st1_row_sum_witness || v > cert.st1_max_row_sum) {
            cert.st1_max_row_sum = v;
            cert.st1_row_sum_witness = x;
        }
    }
    cert.st1_row_sum_pass = cert.st1_max_row_sum <= opt.tol;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double v = std::abs(row_inner[p]) / Cd;
        if (!cert.st1_row_pair_witness || v > cert.st1_max_row_inner) {
            cert.st1_max_row_inner = v;
            cert.st1_row_pair_witness = pairs[p];
        }
    }
    cert.st1_row_orthogonality_pass = cert.st1_max_row_inner <= opt.tol;
    if (cert.st1_row_sum_pass) cert.st1_row_sum_witness.reset();
    if (cert.st1_row_orthogonality_pass) cert.st1_row_pair_witness.reset();

    // (St2): hash every column, then check products.
    HashIndex index;
    index.entries.resize(C);
    parallel_for(chunks, opt.threads, [&](std::size_t c) {
        std::vector<Complex> scratch;
        for (std::uint64_t j = c * chunk; j < std::min<std::uint64_t>(C, (c + 1) * chunk); ++j)
            index.entries[j] = {quantized_hash(cache.get(j, scratch)), j};
    });
    std::sort(index.entries.begin(), index.entries.end());
    cert.st2_pass = true;
    auto fail = [&](std::string why, std::uint64_t a, std::uint64_t b) {
        if (!cert.st2_pass) return;
        cert.st2_pass = false;
        cert.st2_failure = std::move(why);
        cert.st2_witness = std::make_pair(a, b);
    };
    {
        std::vector<Complex> s1, s2;
        for (std::size_t i = 1; i < index.entries.size() && cert.st2_pass; ++i) {
            if (index.entries[i].first != index.entries[i - 1].first) continue;
            const auto a = index.entries[i - 1].second;
            const auto b = index.entries[i].second;
            if (max_abs_diff(cache.get(a, s1), cache.get(b, s2)) <= opt.tol)
                fail("duplicate columns", std::min(a, b), std::max(a, b));
        }
    }
    std::vector<Complex> prod(N), s1, s2, s3;
    auto check_product = [&](std::uint64_t a, std::uint64_t b) -> std::optional<std::uint64_t> {
        const auto ca = cache.get(a, s1);
        const auto cb = cache.get(b, s2);
        for (std::size_t x = 0; x < N; ++x) prod[x] = ca[x] * cb[x];
        ++cert.st2_products_checked;
        auto hit = index.find(prod, cache, opt.tol, s3);
        if (!hit) fail("pointwise product is not a column", a, b);
        return hit;
    };
    if (cert.st2_pass) {
        const std::vector<std::uint64_t> gens = matrix.oracle().group_generators();
        if (opt.mode == CertifyMode::Sampled) {
            Rng rng(derive_seed(opt.seed, 12));
            for (std::size_t s = 0; s < opt.product_samples && cert.st2_pass; ++s) {
                const std::uint64_t a = rng.below(C);
                check_product(a, rng.below(C));
            }
        } else if (!gens.empty()) {
            // The columns form a group iff the group generated from the identity by the
            // generators stays inside the column set and reaches every column.
            std::vector<Complex> ones(N, Complex{1.0, 0.0});
            const auto identity = index.find(ones, cache, opt.tol, s3);
            if (!identity) {
                fail("no all-ones column", 0, 0);
            } else {
                std::vector<char> seen(C, 0);
                std::vector<std::uint64_t> queue{*identity};
                seen[*identity] = 1;
                for (std::size_t head = 0; head < queue.size() && cert.st2_pass; ++head) {
                    for (std::uint64_t g : gens) {
                        const auto hit = check_product(queue[head], g);
                        if (!hit) break;
                        if (!seen[*hit]) {
                            seen[*hit] = 1;
                            queue.push_back(*hit);
                        }
                    }
                }
                if (cert.st2_pass && queue.size() != C) {
                    const auto missing = static_cast<std::uint64_t>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
                    fail("column not generated by the family generators", missing, *identity);
                }
            }
        } else {
            if (C > 4096) throw std::invalid_argument("certify: exhaustive product check without generators needs C <= 4096");
            for (std::uint64_t a = 0; a < C && cert.st2_pass; ++a)
                for (std::uint64_t b = a; b < C && cert.st2_pass; ++b) check_product(a, b);
        }
    }

    // (St3): every non-identity column sum.
    const std::vector<Complex> sums = matrix.column_sums();
    const double Nd = static_cast<double>(N);
    std::map<double, std::uint64_t> hist;
    cert.max_column_sum_sq = 0.0;
    for (std::uint64_t j = 0; j < C; ++j) {
        if (std::abs(sums[j] - Nd) <= opt.tol * Nd) continue;
        const double s2v = std::norm(sums[j]);
        if (s2v > cert.max_column_sum_sq) {
            cert.max_column_sum_sq = s2v;
            cert.st3_witness = j;
        }
        const double key = std::round(s2v * 1e6) / 1e6;
        ++hist[key == 0.0 ? 0.0 : key];
    }
    cert.column_sum_sq_values.assign(hist.begin(), hist.end());
    if (cert.max_column_sum_sq <= opt.tol * Nd * Nd || N < 2)
        cert.st3_eta = 2.0;
    else
        cert.st3_eta = std::min(2.0, 2.0 - std::log(cert.max_column_sum_sq) / std::log(Nd));
    cert.st3_pass = cert.st3_eta > 0.0;
    return cert;
}

double column_sum_eta(const SensingMatrix& matrix, double tol) {
    const std::vector<Complex> sums = matrix.column_sums();
    const double Nd = static_cast<double>(matrix.rows());
    double mx = 0.0;
    for (const auto& s : sums)
        if (std::abs(s - Nd) > tol * Nd) mx = std::max(mx, std::norm(s));
    if (mx <= tol * Nd * Nd || matrix.rows() < 2) return 2.0;
    return std::min(2.0, 2.0 - std::log(mx) / std::log(Nd));
}

ClosureReport closure_prediction_check(const SensingMatrix& matrix, double tol, unsigned threads) {
    const std::uint64_t C = matrix.cols();
    const std::size_t N = matrix.rows();
    if (static_cast<double>(C) * static_cast<double>(C) > 1e8)
        throw std::invalid_argument("closure_prediction_check: too many column pairs");
    const ColumnCache cache(matrix, threads);
    std::vector<std::uint64_t> bad(C, 0);
    std::vector<std::uint64_t> first_bad(C, C);
    parallel_for(C, threads, [&](std::size_t a) {
        std::vector<Complex> s1, s2, s3;
        const auto ca = cache.get(a, s1);
        for (std::uint64_t b = 0; b < C; ++b) {
            const auto pred = matrix.product_index(a, b);
            bool ok = pred.has_value();
            if (ok) {
                const auto cb = cache.get(b, s2);
                const auto cp = cache.get(*pred, s3);
                for (std::size_t x = 0; x < N && ok; ++x) ok = std::abs(ca[x] * cb[x] - cp[x]) <= tol;
            }
            if (!ok) {
                if (bad[a] == 0) first_bad[a] = b;
                ++bad[a];
            }
        }
    });
    ClosureReport rep;
    rep.pairs = C * C;
    for (std::uint64_t a = 0; a < C; ++a) {
        rep.mismatches += bad[a];
        if (bad[a] && !rep.witness) rep.witness = std::make_pair(a, first_bad[a]);
    }
    return rep;
}

BoundValue strip_delta(double N, double C, double k, double eps, double eta) {
    if (!(N >= 1) || !(C >= 2) || !(k >= 1)) throw std::invalid_argument("strip_delta: need N >= 1, C >= 2, k >= 1");
    if (!(eta > 0) || eta > 2) throw std::invalid_argument("strip_delta: eta must lie in (0, 2]");
    const double gap = eps - (k - 1) / (C - 1);
    if (!(gap > 0)) return {2.0, true};
    return {2.0 * std::exp(-gap * gap * std::pow(N, eta) / (8.0 * k)), false};
}

BoundValue strip_delta_sharpened(double N, double C, double eta, double eps, double rho, double k) {
    if (!(N >= 1) || !(C >= 2) || !(k >= 1)) throw std::invalid_argument("strip_delta_sharpened: need N >= 1, C >= 2, k >= 1");
    if (!(eta > 0) || eta > 2) throw std::invalid_argument("strip_delta_sharpened: eta must lie in (0, 2]");
    if (!(rho >= 1.0) || rho > std::sqrt(k) * (1.0 + 1e-12))
        throw std::invalid_argument("strip_delta_sharpened: rho must lie in [1, sqrt(k)]");
    double inner = (eps - 1.0 / (C - 1)) / rho;
    if (rho > std::sqrt(2.0)) inner -= (rho * rho - 2.0) / (rho * (C - 1));
    if (!(inner > 0)) return {2.0, true};
    return {2.0 * std::exp(-std::pow(N, eta) * inner * inner / 8.0), false};
}

double coherence_mean(double N, double C, double k) { return k / N * (C - N) / (C - 1); }

double coherence_threshold(double N, double C, double k, double eta, double delta) {
    if (!(delta > 0)) throw std::invalid_argument("coherence_threshold: delta must be positive");
    return coherence_mean(N, C, k) + std::sqrt(2.0 * k * std::log(C / delta)) / std::pow(N, eta);
}

BoundReport bound_report(double N, double C, double k, double eps, double eta) {
    BoundReport r;
    r.N = N;
    r.C = C;
    r.k = k;
    r.epsilon = eps;
    r.eta = eta;
    r.delta = strip_delta(N, C, k, eps, eta);
    r.coherence_mean = coherence_mean(N, C, k);
    r.coherence_tail = coherence_threshold(N, C, k, eta, r.delta.value);
    return r;
}

json BoundReport::to_json() const {
    json j{{"N", N}, {"C", C}, {"k", k}, {"epsilon", epsilon}, {"eta", eta},
           {"delta", delta.value}, {"delta_vacuous", delta.vacuous},
           {"coherence_mean", coherence_mean}, {"coherence_threshold", coherence_tail}};
    json sharp = json::array();
    for (double rho : {1.0, std::sqrt(2.0), std::sqrt(k)}) {
        if (rho > std::sqrt(k)) continue;
        const auto b = sharpened(rho);
        sharp.push_back({{"rho", rho}, {"delta", b.value}, {"vacuous", b.vacuous}});
    }
    j["sharpened"] = sharp;
    return j;
}

double expected_energy_closed_form(std::span<const Complex> values, double C) {
    double norm2 = 0.0;
    Complex sum = 0.0;
    for (const auto& v : values) {
        norm2 += std::norm(v);
        sum += v;
    }
    if (norm2 == 0.0) return 1.0;
    return 1.0 - (std::norm(sum) - norm2) / ((C - 1.0) * norm2);
}

EnergyEstimate expected_energy(const SensingMatrix& matrix, std::span<const Complex> values, EnergyMode mode,
                               std::size_t trials, std::uint64_t seed, unsigned threads) {
    const std::size_t k = values.size();
    const std::uint64_t C = matrix.cols();
    const std::size_t N = matrix.rows();
    if (k > C) throw std::invalid_argument("expected_energy: more values than columns");
    EnergyEstimate est;
    if (k == 0) return est;
    if (mode == EnergyMode::Exact) {
        double count = 1.0;
        for (std::size_t i = 0; i < k; ++i) count *= static_cast<double>(C - i);
        if (count > 2e7 || C > 4096) throw std::invalid_argument("expected_energy: exact enumeration too large");
        std::vector<Complex> gram(C * C);
        {
            const ColumnCache cache(matrix, threads);
            std::vector<Complex> s1, s2;
            for (std::uint64_t a = 0; a < C; ++a)
                for (std::uint64_t b = 0; b < C; ++b)
                    gram[a * C + b] = inner(cache.get(a, s1), cache.get(b, s2)) / static_cast<double>(N);
        }
        long double total = 0.0L;
        std::uint64_t n = 0;
        std::vector<std::uint64_t> pos(k);
        std::vector<char> used(C, 0);
        auto rec = [&](auto&& self, std::size_t depth) -> void {
            if (depth == k) {
                Complex e = 0.0;
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) e += std::conj(values[a]) * values[b] * gram[pos[a] * C + pos[b]];
                total += static_cast<long double>(e.real());
                ++n;
                return;
            }
            for (std::uint64_t j = 0; j < C; ++j) {
                if (used[j]) continue;
                used[j] = 1;
                pos[depth] = j;
                self(self, depth + 1);
                used[j] = 0;
            }
        };
        rec(rec, 0);
        est.mean = static_cast<double>(total / static_cast<long double>(n));
        est.samples = n;
        return est;
    }
    if (trials < 2) throw std::invalid_argument("expected_energy: Monte-Carlo needs at least 2 trials");
    std::vector<double> e(trials);
    const DistinctTupleSampler sampler(C, k);
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::uint64_t> support(k);
        sampler.sample_into(rng, support);
        const auto f = matrix.apply_sparse(support, values);
        double s = 0.0;
        for (const auto& z : f) s += std::norm(z);
        e[t] = s / static_cast<double>(N);
    });
    double mean = 0.0;
    for (double v : e) mean += v;
    mean /= static_cast<double>(trials);
    double var = 0.0;
    for (double v : e) var += (v - mean) * (v - mean);
    var /= static_cast<double>(trials - 1);
    est.mean = mean;
    est.standard_error = std::sqrt(var / static_cast<double>(trials));
    est.samples = trials;
    return est;
}

StripMonteCarlo strip_montecarlo(const SensingMatrix& matrix, std::size_t k, double eps, ValueModel model,
                                 std::size_t trials, std::uint64_t seed, unsigned threads) {
    if (k == 0 || k > matrix.cols()) throw std::invalid_argument("strip_montecarlo: k must be in [1, C]");
    if (trials == 0) throw std::invalid_argument("strip_montecarlo: trials must be positive");
    StripMonteCarlo out;
    out.trials.resize(trials);
    const DistinctTupleSampler sampler(matrix.cols(), k);
    const double N = static_cast<double>(matrix.rows());
    parallel_for(trials, threads, [&](std::size_t t) {
        Rng rng(derive_seed(seed, t));
        std::vector<std::uint64_t> support(k);
        sampler.sample_into(rng, support);
        const auto values = sample_values(k, model, rng);
        const auto f = matrix.apply_sparse(support, values);
        double fn = 0.0, an = 0.0;
        for (const auto& z : f) fn += std::norm(z);
        for (const auto& z : values) an += std::norm(z);
        const double ratio = fn / N / an;
        out.trials[t] = {ratio - 1.0, ratio < 1.0 - eps || ratio > 1.0 + eps};
    });
    std::size_t bad = 0;
    for (const auto& t : out.trials) bad += t.violated;
    out.failure_rate = static_cast<double>(bad) / static_cast<double>(trials);
    return out;
}

CoherenceStats coherence_stats(const SensingMatrix& matrix, std::size_t k, const CoherenceOptions& opt) {
    const std::uint64_t C = matrix.cols();
    const std::size_t N = matrix.rows();
    const double N2 = static_cast<double>(N) * static_cast<double>(N);
    CoherenceStats st;
    if (opt.trials == 0) throw std::invalid_argument("coherence_stats: trials must be positive");
    st.samples.assign(opt.trials, 0.0);
    if (k == 0) return st;
    if (k >= C) throw std::invalid_argument("coherence_stats: k must be below C");

    if (opt.policy == WPolicy::Fixed) {
        if (opt.w >= C) throw std::out_of_range("coherence_stats: w out of range");
        const auto phi_w = matrix.column(opt.w);
        const DistinctTupleSampler sampler(C, k);
        parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
            Rng rng(derive_seed(opt.seed, t));
            std::vector<std::uint64_t> kappa(k);
            sampler.sample_excluding(rng, opt.w, kappa);
            std::vector<Complex> col(N);
            double s = 0.0;
            for (auto j : kappa) {
                matrix.column_into(j, col);
                s += std::norm(inner(col, phi_w));
            }
            st.samples[t] = s / N2;
        });
    } else {
        const DGSet* set = matrix.dg_set();
        if (!set && static_cast<double>(C) * static_cast<double>(N) * static_cast<double>(k) > 1e9)
            throw std::invalid_argument("coherence_stats: the 'all' policy is too large for this family");
        const DistinctTupleSampler sampler(C, k);
        parallel_for(opt.trials, opt.threads, [&](std::size_t t) {
            Rng rng(derive_seed(opt.seed, t));
            std::vector<std::uint64_t> kappa(k);
            sampler.sample_into(rng, kappa);
            std::vector<double> coh(C, 0.0);
            std::vector<Complex> col(N), other(N), h(N);
            for (auto j : kappa) {
                matrix.column_into(j, col);
                if (set) {
                    // All columns sharing a matrix P at once: <phi_j, phi_{P,b}> = +-WHT(conj(phi_j) phi_{P,0})(b).
                    const int m = set->m();
                    for (std::uint64_t c = 0; c < set->size(); ++c) {
                        matrix.column_into(c << m, other);
                        for (std::size_t x = 0; x < N; ++x) h[x] = std::conj(col[x]) * other[x];
                        fwht(std::span<Complex>(h));
                        for (std::size_t b = 0; b < N; ++b) coh[(c << m) | b] += std::norm(h[b]) / N2;
                    }
                } else {
                    for (std::uint64_t w = 0; w < C; ++w) {
                        matrix.column_into(w, other);
                        coh[w] += std::norm(inner(col, other)) / N2;
                    }
                }
            }
            for (auto j : kappa) coh[j] = -1.0;
            st.samples[t] = *std::max_element(coh.begin(), coh.end());
        });
    }
    double mean = 0.0;
    std::size_t above = 0;
    for (double v : st.samples) {
        mean += v;
        st.max = std::max(st.max, v);
        if (v >= opt.threshold) ++above;
    }
    mean /= static_cast<double>(opt.trials);
    double var = 0.0;
    for (double v : st.samples) var += (v - mean) * (v - mean);
    st.mean = mean;
    st.standard_error = opt.trials > 1 ? std::sqrt(var / static_cast<double>(opt.trials - 1) / static_cast<double>(opt.trials)) : 0.0;
    st.tail_estimate = static_cast<double>(above) / static_cast<double>(opt.trials);
    return st;
}

double coherence_exact_mean(const SensingMatrix& matrix, std::size_t k, std::uint64_t w) {
    const std::uint64_t C = matrix.cols();
    if (w >= C) throw std::out_of_range("coherence_exact_mean: w out of range");
    if (k == 0) return 0.0;
    if (C > 4096) throw std::invalid_argument("coherence_exact_mean: too many columns to enumerate");
    const auto phi_w = matrix.column(w);
    const double N2 = static_cast<double>(matrix.rows()) * static_cast<double>(matrix.rows());
    std::vector<double> c;
    std::vector<Complex> col(matrix.rows());
    for (std::uint64_t j = 0; j < C; ++j) {
        if (j == w) continue;
        matrix.column_into(j, col);
        c.push_back(std::norm(inner(col, phi_w)) / N2);
    }
    const auto subsets = all_subsets(c.size(), k);
    if (subsets.size() > 20000000) throw std::invalid_argument("coherence_exact_mean: too many subsets");
    long double total = 0.0L;
    for (const auto& s : subsets) {
        long double v = 0.0L;
        for (auto i : s) v += c[i];
        total += v;
    }
    return static_cast<double>(total / static_cast<long double>(subsets.size()));
}

double gram_condition_number(const SensingMatrix& matrix, std::span<const std::uint64_t> support) {
    const std::size_t k = support.size();
    const std::size_t N = matrix.rows();
    std::vector<std::vector<Complex>> cols;
    for (auto j : support) cols.push_back(matrix.column(j));
    ComplexMatrix G(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            const Complex g = inner(cols[a], cols[b]) / static_cast<double>(N);
            G(a, b) = g;
            G(b, a) = std::conj(g);
        }
    const auto eig = hermitian_eigenvalues(G);
    if (eig.empty()) return 1.0;
    if (eig.front() <= 1e-14) return std::numeric_limits<double>::infinity();
    return std::sqrt(eig.back() / eig.front());
}

ConditionResult condition_experiment(const SensingMatrix& matrix, std::span<const std::size_t> ks,
                                     std::size_t trials, std::uint64_t seed, unsigned threads) {
    ConditionResult res;
    for (auto k : ks)
        if (k == 0 || k > matrix.rows() || k > 64 || k > matrix.cols())
            throw std::invalid_argument("condition_experiment: k must be in [1, min(N, C, 64)]");
    res.rows.resize(ks.size() * trials);
    parallel_for(res.rows.size(), threads, [&](std::size_t i) {
        const std::size_t ki = i / trials;
        const std::size_t t = i % trials;
        const std::size_t k = ks[ki];
        Rng rng(derive_seed(seed, k, t));
        std::vector<std::uint64_t> support(k);
        DistinctTupleSampler(matrix.cols(), k).sample_into(rng, support);
        res.rows[i] = {k, t, gram_condition_number(matrix, support)};
    });
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        ConditionSummary s;
        s.k = ks[ki];
        std::vector<double> finite;
        for (std::size_t t = 0; t < trials; ++t) {
            const double c = res.rows[ki * trials + t].cond;
            if (std::isfinite(c)) finite.push_back(c);
            else ++s.infinite;
        }
        if (!finite.empty()) {
            for (double c : finite) s.mean += c;
            s.mean /= static_cast<double>(finite.size());
            double var = 0.0;
            for (double c : finite) var += (c - s.mean) * (c - s.mean);
            s.std = finite.size() > 1 ? std::sqrt(var / static_cast<double>(finite.size() - 1)) : 0.0;
        }
        if (s.infinite) s.mean = std::numeric_limits<double>::infinity();
        res.summary.push_back(s);
    }
    return res;
}

bool uniqueness_bruteforce(const SensingMatrix& matrix, const SparseSignal& alpha, double tol) {
    const std::uint64_t C = matrix.cols();
    const std::size_t k = alpha.k();
    if (C > 64 || k > 3) throw std::invalid_argument("uniqueness_bruteforce: needs C <= 64 and k <= 3");
    if (alpha.ambient() != C) throw std::invalid_argument("uniqueness_bruteforce: dimension mismatch");
    if (k == 0) return true;
    const std::size_t N = matrix.rows();
    const auto y = matrix.apply_sparse(alpha.indices(), alpha.values());
    double ynorm = 0.0;
    for (const auto& z : y) ynorm += std::norm(z);
    ynorm = std::sqrt(ynorm);
    const auto support = alpha.indices();
    std::vector<std::vector<Complex>> cols(C);
    for (std::uint64_t j = 0; j < C; ++j) cols[j] = matrix.column(j);

    for (const auto& S : all_subsets(C, k)) {
        // Orthonormal basis of range(Phi_S) by modified Gram-Schmidt.
        std::vector<std::vector<Complex>> q;
        for (auto j : S) {
            std::vector<Complex> v = cols[j];
            for (const auto& e : q) {
                const Complex c = inner(e, v);
                for (std::size_t x = 0; x < N; ++x) v[x] -= c * e[x];
            }
            double nv = 0.0;
            for (const auto& z : v) nv += std::norm(z);
            nv = std::sqrt(nv);
            if (nv > tol * std::sqrt(static_cast<double>(N))) {
                for (auto& z : v) z /= nv;
                q.push_back(std::move(v));
            }
        }
        std::vector<Complex> r = y;
        for (const auto& e : q) {
            const Complex c = inner(e, r);
            for (std::size_t x = 0; x < N; ++x) r[x] -= c * e[x];
        }
        double rn = 0.0;
        for (const auto& z : r) rn += std::norm(z);
        const bool in_range = std::sqrt(rn) <= tol * std::max(1.0, ynorm);
        if (!in_range) continue;
        const bool same = std::equal(S.begin(), S.end(), support.begin());
        if (q.size() < S.size() || !same) return false;
    }
    return true;
}

} // namespace stripcs
