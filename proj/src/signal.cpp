#include "stripcs/signal.hpp"

#include "stripcs/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stripcs {

std::string value_model_name(ValueModel v) {
    switch (v) {
    case ValueModel::UnitSphere: return "unit_sphere";
    case ValueModel::Gaussian: return "gaussian";
    case ValueModel::RandomPhase: return "random_phase";
    }
    return "unknown";
}

ValueModel parse_value_model(const std::string& name) {
    if (name == "unit_sphere" || name == "sphere") return ValueModel::UnitSphere;
    if (name == "gaussian") return ValueModel::Gaussian;
    if (name == "random_phase" || name == "phase") return ValueModel::RandomPhase;
    throw std::invalid_argument("value_model: unknown model '" + name + "'");
}

std::vector<Complex> sample_values(std::size_t k, ValueModel model, Rng& rng) {
    std::vector<Complex> v(k);
    switch (model) {
    case ValueModel::RandomPhase:
        for (auto& z : v) z = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
        break;
    case ValueModel::Gaussian:
        for (auto& z : v) {
            const double re = rng.normal();
            z = {re, rng.normal()};
        }
        break;
    case ValueModel::UnitSphere: {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& z : v) {
                const double re = rng.normal();
                z = {re, rng.normal()};
                norm2 += std::norm(z);
            }
        } while (k > 0 && norm2 == 0.0);
        const double s = k > 0 ? 1.0 / std::sqrt(norm2) : 0.0;
        for (auto& z : v) z *= s;
        break;
    }
    }
    return v;
}

SparseSignal::SparseSignal(std::uint64_t ambient, std::vector<std::pair<std::uint64_t, Complex>> entries)
    : ambient_(ambient), entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].first >= ambient_) throw std::invalid_argument("SparseSignal: index out of range");
        if (entries_[i].second == Complex{}) throw std::invalid_argument("SparseSignal: zero value on the support");
        if (i > 0 && entries_[i].first == entries_[i - 1].first)
            throw std::invalid_argument("SparseSignal: repeated index");
    }
}

std::vector<std::uint64_t> SparseSignal::indices() const {
    std::vector<std::uint64_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.first);
    return out;
}

std::vector<Complex> SparseSignal::values() const {
    std::vector<Complex> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.second);
    return out;
}

double SparseSignal::norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += std::norm(e.second);
    return std::sqrt(s);
}

Complex SparseSignal::at(std::uint64_t j) const {
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), j,
                                     [](const auto& e, std::uint64_t v) { return e.first < v; });
    return (it != entries_.end() && it->first == j) ? it->second : Complex{};
}

double SparseSignal::distance(const SparseSignal& a, const SparseSignal& b) {
    if (a.ambient_ != b.ambient_) throw std::invalid_argument("SparseSignal::distance: ambient dimension mismatch");
    double s = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries_.size() || j < b.entries_.size()) {
        if (j == b.entries_.size() || (i < a.entries_.size() && a.entries_[i].first < b.entries_[j].first)) {
            s += std::norm(a.entries_[i++].second);
        } else if (i == a.entries_.size() || b.entries_[j].first < a.entries_[i].first) {
            s += std::norm(b.entries_[j++].second);
        } else {
            s += std::norm(a.entries_[i++].second - b.entries_[j++].second);
        }
    }
    return std::sqrt(s);
}

SparseSignal sample_signal(std::uint64_t C, std::size_t k, ValueModel model, std::uint64_t seed) {
    if (k > C) throw std::invalid_argument("sample_signal: k exceeds the ambient dimension");
    Rng rng(seed);
    const DistinctTupleSampler sampler(C, k);
    std::vector<std::uint64_t> support(k);
    sampler.sample_into(rng, support);
    const std::vector<Complex> values = sample_values(k, model, rng);
    std::vector<std::pair<std::uint64_t, Complex>> entries;
    for (std::size_t i = 0; i < k; ++i) entries.emplace_back(support[i], values[i]);
    return SparseSignal(C, std::move(entries));
}

} // namespace stripcs
