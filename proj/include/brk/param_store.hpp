#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "brk/matrix.hpp"

namespace bnews {

struct ParamEntry {
    Matrix value;
    Matrix grad;
    Matrix m;  // Adam first moment
    Matrix v;  // Adam second moment
    std::uint64_t step = 0;
};

/// Named trainable tensors together with their gradient accumulators and
/// optimizer state. Iteration order is lexicographic by name, which fixes the
/// order of every reduction performed over the store.
class ParamStore {
public:
    using Map = std::map<std::string, ParamEntry>;

    void add(const std::string& name, Matrix value);
    bool contains(const std::string& name) const { return entries_.contains(name); }

    const ParamEntry& entry(const std::string& name) const;
    ParamEntry& entry(const std::string& name);

    const Matrix& value(const std::string& name) const { return entry(name).value; }
    Matrix& value(const std::string& name) { return entry(name).value; }
    const Matrix& grad(const std::string& name) const { return entry(name).grad; }

    void accumulate_grad(const std::string& name, const Matrix& g);
    void zero_grads();

    std::vector<std::string> names() const;
    std::size_t parameter_count() const;

    const Map& entries() const noexcept { return entries_; }

private:
    Map entries_;
};

// Raw bytes of every value matrix whose name is in `names` (or all names when
// `names` is empty); used to assert that frozen partitions are untouched.
std::vector<unsigned char> snapshot_values(const ParamStore& store,
                                           const std::set<std::string>& names = {});

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

/// Bias-corrected Adam update of the entries named in `subset`. Gradients of
/// the updated entries are zeroed and their step counters incremented; all
/// other entries are left untouched.
void adam_step(ParamStore& store, const AdamConfig& cfg, const std::set<std::string>& subset);

}  // namespace bnews
