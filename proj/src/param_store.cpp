#include "brk/param_store.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace bnews {

void ParamStore::add(const std::string& name, Matrix value) {
    if (entries_.contains(name)) throw std::invalid_argument("duplicate parameter '" + name + "'");
    if (!value.all_finite()) throw std::invalid_argument("non-finite initial value for '" + name + "'");
    ParamEntry e;
    e.grad = Matrix(value.rows(), value.cols());
    e.m = Matrix(value.rows(), value.cols());
    e.v = Matrix(value.rows(), value.cols());
    e.value = std::move(value);
    entries_.emplace(name, std::move(e));
}

const ParamEntry& ParamStore::entry(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second;
}

ParamEntry& ParamStore::entry(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw std::out_of_range("unknown parameter '" + name + "'");
    return it->second;
}

void ParamStore::accumulate_grad(const std::string& name, const Matrix& g) {
    auto& e = entry(name);
    require_same_shape(e.grad, g, name.c_str());
    e.grad += g;
}

void ParamStore::zero_grads() {
    for (auto& [_, e] : entries_)
        for (double& x : e.grad.data()) x = 0.0;
}

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
}

std::size_t ParamStore::parameter_count() const {
    std::size_t n = 0;
    for (const auto& [_, e] : entries_) n += e.value.size();
    return n;
}

std::vector<unsigned char> snapshot_values(const ParamStore& store,
                                           const std::set<std::string>& names) {
    std::vector<unsigned char> bytes;
    for (const auto& [name, e] : store.entries()) {
        if (!names.empty() && !names.contains(name)) continue;
        const auto data = e.value.data();
        const auto* p = reinterpret_cast<const unsigned char*>(data.data());
        bytes.insert(bytes.end(), p, p + data.size_bytes());
    }
    return bytes;
}

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("adam: learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("adam: beta1 must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("adam: beta2 must be in [0,1)");
    if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be > 0");
}

void adam_step(ParamStore& store, const AdamConfig& cfg, const std::set<std::string>& subset) {
    cfg.validate();
    // Validate everything first so a failure leaves the store untouched.
    for (const auto& name : subset) {
        const auto& e = store.entry(name);
        if (!e.grad.all_finite()) throw std::runtime_error("non-finite gradient for '" + name + "'");
    }
    for (const auto& name : subset) {
        auto& e = store.entry(name);
        e.step += 1;
        const double t = static_cast<double>(e.step);
        const double c1 = 1.0 - std::pow(cfg.beta1, t);
        const double c2 = 1.0 - std::pow(cfg.beta2, t);
        auto x = e.value.data();
        auto g = e.grad.data();
        auto m = e.m.data();
        auto v = e.v.data();
        for (std::size_t i = 0; i < x.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            x[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
            g[i] = 0.0;
        }
    }
}

}  // namespace bnews
