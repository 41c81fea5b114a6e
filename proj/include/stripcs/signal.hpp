#pragma once

#include "stripcs/algebra.hpp"
#include "stripcs/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stripcs {

/// Distribution of the nonzero values of a sparse signal.
enum class ValueModel {
    UnitSphere,   // uniform on the unit sphere of C^k
    Gaussian,     // i.i.d. standard complex normal
    RandomPhase,  // unit magnitude, uniform phase
};

std::string value_model_name(ValueModel v);
ValueModel parse_value_model(const std::string& name);

std::vector<Complex> sample_values(std::size_t k, ValueModel model, Rng& rng);

/// k-sparse vector in C^C stored as (index, value) pairs sorted by index.
class SparseSignal {
public:
    SparseSignal() = default;
    /// Sorts by index; throws on repeated indices, zero values, or indices >= ambient.
    SparseSignal(std::uint64_t ambient, std::vector<std::pair<std::uint64_t, Complex>> entries);

    std::uint64_t ambient() const { return ambient_; }
    std::size_t k() const { return entries_.size(); }
    const std::vector<std::pair<std::uint64_t, Complex>>& entries() const { return entries_; }
    std::vector<std::uint64_t> indices() const;
    std::vector<Complex> values() const;
    double norm() const;
    /// Value at index j, zero off the support.
    Complex at(std::uint64_t j) const;

    /// Euclidean distance between two signals over the same ambient space.
    static double distance(const SparseSignal& a, const SparseSignal& b);

private:
    std::uint64_t ambient_ = 0;
    std::vector<std::pair<std::uint64_t, Complex>> entries_;
};

/// Uniform k-subset support with values drawn from the model.
SparseSignal sample_signal(std::uint64_t C, std::size_t k, ValueModel model, std::uint64_t seed);

} // namespace stripcs
