#pragma once

// Scalar-loop reimplementations used as references in tests. Nothing in here
// calls the library's matrix kernels.

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat zeros(std::size_t r, std::size_t c) { return Mat(r, std::vector<double>(c, 0.0)); }

inline Mat mul(const Mat& a, const Mat& b) {
    Mat out = zeros(a.size(), b.empty() ? 0 : b[0].size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < out[i].size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < b.size(); ++k) s += a[i][k] * b[k][j];
            out[i][j] = s;
        }
    return out;
}

inline Mat transposed(const Mat& a) {
    Mat out = zeros(a.empty() ? 0 : a[0].size(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[j][i] = a[i][j];
    return out;
}

// F[s][t] = tanh(sum_ij xn[s][i] wf[i][j] xs[t][j])
inline Mat affinity(const Mat& xn, const Mat& xs, const Mat& wf) {
    const std::size_t n = xn.size(), d = wf.size();
    Mat f = zeros(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            double acc = 0.0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) acc += xn[s][i] * wf[i][j] * xs[t][j];
            f[s][t] = std::tanh(acc);
        }
    return f;
}

// R = tanh(Xn Wn + F Xs Ws)
inline Mat reference(const Mat& xn, const Mat& xs, const Mat& f, const Mat& wn, const Mat& ws) {
    const auto a = mul(xn, wn);
    const auto b = mul(mul(f, xs), ws);
    Mat r = a;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r[i].size(); ++j) r[i][j] = std::tanh(a[i][j] + b[i][j]);
    return r;
}

inline double cos_sim(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) return 0.0;
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

inline Mat edge_weights(const Mat& xn, const Mat& r) {
    const std::size_t n = xn.size();
    Mat w = zeros(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            if (s != t) w[s][t] = std::clamp(cos_sim(xn[s], r[t]), 0.0, 1.0);
    return w;
}

// One layer: H'[t] = relu(((H[t] + sum_{s!=t} w[s][t] H[s]) / (1 + sum_{s!=t} w[s][t])) W)
inline Mat gcn_layer(const Mat& w, const Mat& h, const Mat& layer) {
    const std::size_t n = h.size();
    Mat agg = zeros(n, h[0].size());
    for (std::size_t t = 0; t < n; ++t) {
        double deg = 1.0;
        for (std::size_t k = 0; k < h[t].size(); ++k) agg[t][k] = h[t][k];
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            deg += w[s][t];
            for (std::size_t k = 0; k < h[s].size(); ++k) agg[t][k] += w[s][t] * h[s][k];
        }
        for (auto& x : agg[t]) x /= deg;
    }
    auto out = mul(agg, layer);
    for (auto& row : out)
        for (auto& x : row) x = std::max(0.0, x);
    return out;
}

inline Mat gcn(const Mat& w, const Mat& x, const Mat& w1, const Mat& w2) {
    return gcn_layer(w, gcn_layer(w, x, w1), w2);
}

inline double kl(const Mat& a, const Mat& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::vector<double> p(a[i].size()), q(b[i].size());
        double zp = 0, zq = 0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            p[k] = std::exp(a[i][k]);
            q[k] = std::exp(b[i][k]);
            zp += p[k];
            zq += q[k];
        }
        double row = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double pk = p[k] / zp;
            const double qk = std::max(q[k] / zq, 1e-12);
            if (pk > 0.0) row += pk * std::log(pk / qk);
        }
        total += row;
    }
    return total / static_cast<double>(a.size());
}

inline double bce(const std::vector<double>& p, const std::vector<int>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s -= y[i] == 1 ? std::log(p[i]) : std::log(1.0 - p[i]);
    return s / static_cast<double>(p.size());
}

struct Scores {
    double accuracy, precision, recall, f1;
};

// Weighted two-class scores from explicit confusion counts.
inline Scores weighted_scores(const std::vector<double>& probs, const std::vector<int>& labels,
                              double threshold = 0.5) {
    double tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const int pred = probs[i] >= threshold ? 1 : 0;
        if (pred == 1 && labels[i] == 1) ++tp;
        if (pred == 1 && labels[i] == 0) ++fp;
        if (pred == 0 && labels[i] == 1) ++fn;
        if (pred == 0 && labels[i] == 0) ++tn;
    }
    auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
    auto f = [](double p, double r) { return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r); };
    const double n = tp + fp + fn + tn;
    // class 1 as positive
    const double p1 = ratio(tp, tp + fp), r1 = ratio(tp, tp + fn);
    // class 0 as positive
    const double p0 = ratio(tn, tn + fn), r0 = ratio(tn, tn + fp);
    const double w1 = (tp + fn) / n, w0 = (tn + fp) / n;
    return {(tp + tn) / n, w1 * p1 + w0 * p0, w1 * r1 + w0 * r0, w1 * f(p1, r1) + w0 * f(p0, r0)};
}

inline double max_abs_diff(const Mat& a, const Mat& b) {
    double m = 0.0;
    if (a.size() != b.size()) return INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return INFINITY;
        for (std::size_t j = 0; j < a[i].size(); ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    }
    return m;
}

}  // namespace oracle
