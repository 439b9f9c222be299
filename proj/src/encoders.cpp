#include "brk/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bnews {

namespace {

Matrix relu_backward(const Matrix& pre, const Matrix& upstream) {
    require_same_shape(pre, upstream, "relu_backward");
    Matrix out = upstream;
    auto o = out.data();
    auto p = pre.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        if (!(p[i] > 0.0)) o[i] = 0.0;
    return out;
}

void check_square(const Matrix& w, std::size_t n, const char* what) {
    if (w.rows() != n || w.cols() != n)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + "x" +
                                    std::to_string(n) + " edge weights, got " + shape_string(w));
}

// Self-edges never carry weight; the self-loop is the explicit unit term.
Matrix off_diagonal(const Matrix& w) {
    Matrix out = w;
    for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) = 0.0;
    return out;
}

// Backward through aggregate_incoming, accumulating into d_h and d_w.
void aggregate_backward(const Matrix& w, const Matrix& h, const Matrix& agg,
                        const std::vector<double>& degree, const Matrix& d_agg, Matrix& d_h,
                        Matrix& d_w) {
    const std::size_t n = h.rows();
    Matrix g = d_agg;
    for (std::size_t t = 0; t < n; ++t)
        for (double& x : g.row(t)) x /= degree[t];
    d_h += g;
    d_h += matmul(off_diagonal(w), g);
    const Matrix hg = matmul_nt(h, g);  // (s, t) -> h[s] . g[t]
    for (std::size_t t = 0; t < n; ++t) {
        const double ag = dot(agg.row(t), g.row(t));
        for (std::size_t s = 0; s < n; ++s) {
            if (s == t) continue;
            d_w(s, t) += hg(s, t) - ag;
        }
    }
}

double log_sum_exp(std::span<const double> x) {
    const double mx = *std::max_element(x.begin(), x.end());
    double acc = 0.0;
    for (double v : x) acc += std::exp(v - mx);
    return mx + std::log(acc);
}

}  // namespace

std::string_view to_string(Ablation a) {
    switch (a) {
        case Ablation::full: return "full";
        case Ablation::no_inf: return "no_inf";
        case Ablation::no_seq: return "no_seq";
        case Ablation::no_gra: return "no_gra";
    }
    return "full";
}

Ablation parse_ablation(std::string_view s) {
    if (s == "full") return Ablation::full;
    if (s == "no_inf") return Ablation::no_inf;
    if (s == "no_seq") return Ablation::no_seq;
    if (s == "no_gra") return Ablation::no_gra;
    throw std::invalid_argument("unknown ablation '" + std::string(s) +
                                "' (expected full, no_inf, no_seq or no_gra)");
}

void Mlp::validate() const {
    if (b1.rows() != 1 || b1.cols() != w1.cols() || w2.rows() != w1.cols() || b2.rows() != 1 ||
        b2.cols() != w2.cols())
        throw std::invalid_argument("Mlp: inconsistent shapes " + shape_string(w1) + ", " +
                                    shape_string(b1) + ", " + shape_string(w2) + ", " +
                                    shape_string(b2));
}

Matrix aggregate_incoming(const Matrix& edge_weights, const Matrix& h,
                          std::vector<double>* degree) {
    const std::size_t n = h.rows();
    check_square(edge_weights, n, "aggregate_incoming");
    Matrix out = matmul_tn(off_diagonal(edge_weights), h);
    out += h;
    std::vector<double> deg(n, 1.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t)
            if (s != t) deg[t] += edge_weights(s, t);
    for (std::size_t t = 0; t < n; ++t)
        for (double& x : out.row(t)) x /= deg[t];
    if (degree) *degree = std::move(deg);
    return out;
}

GcnTrace gcn_trace(const Matrix& edge_weights, const Matrix& x, const Matrix& w1,
                   const Matrix& w2) {
    if (x.cols() != w1.rows() || w1.cols() != w2.rows())
        throw std::invalid_argument("gcn: shapes " + shape_string(x) + ", " + shape_string(w1) +
                                    ", " + shape_string(w2));
    GcnTrace tr;
    tr.agg1 = aggregate_incoming(edge_weights, x, &tr.degree);
    tr.pre1 = matmul(tr.agg1, w1);
    tr.h1 = relu(tr.pre1);
    tr.agg2 = aggregate_incoming(edge_weights, tr.h1);
    tr.pre2 = matmul(tr.agg2, w2);
    tr.out = relu(tr.pre2);
    return tr;
}

Matrix gcn_forward(const ContentGraph& g, const Matrix& w1, const Matrix& w2) {
    return gcn_trace(g.edge_weights, g.x_node, w1, w2).out;
}

Matrix gcn_forward(const ContentGraph& g, const ModelParams& params) {
    return gcn_forward(g, params.gcn1, params.gcn2);
}

GcnGrads gcn_backward(const Matrix& edge_weights, const Matrix& x, const Matrix& w1,
                      const Matrix& w2, const GcnTrace& tr, const Matrix& d_out) {
    const std::size_t n = x.rows();
    GcnGrads g;
    g.edge_weights = Matrix(n, n);

    const Matrix d_pre2 = relu_backward(tr.pre2, d_out);
    g.w2 = matmul_tn(tr.agg2, d_pre2);
    const Matrix d_agg2 = matmul_nt(d_pre2, w2);
    Matrix d_h1(tr.h1.rows(), tr.h1.cols());
    aggregate_backward(edge_weights, tr.h1, tr.agg2, tr.degree, d_agg2, d_h1, g.edge_weights);

    const Matrix d_pre1 = relu_backward(tr.pre1, d_h1);
    g.w1 = matmul_tn(tr.agg1, d_pre1);
    const Matrix d_agg1 = matmul_nt(d_pre1, w1);
    g.x = Matrix(x.rows(), x.cols());
    aggregate_backward(edge_weights, x, tr.agg1, tr.degree, d_agg1, g.x, g.edge_weights);
    return g;
}

MlpTrace mlp_trace(const Matrix& x, const Mlp& mlp) {
    mlp.validate();
    if (x.cols() != mlp.in_dim())
        throw std::invalid_argument("mlp: input " + shape_string(x) + " for layer " +
                                    shape_string(mlp.w1));
    MlpTrace tr;
    tr.pre1 = add_row_vector(matmul(x, mlp.w1), mlp.b1);
    tr.hidden = relu(tr.pre1);
    tr.out = add_row_vector(matmul(tr.hidden, mlp.w2), mlp.b2);
    return tr;
}

Matrix mlp_forward(const Matrix& x, const Mlp& mlp) { return mlp_trace(x, mlp).out; }

MlpGrads mlp_backward(const Matrix& x, const Mlp& mlp, const MlpTrace& tr, const Matrix& d_out) {
    require_same_shape(tr.out, d_out, "mlp_backward");
    MlpGrads g;
    g.params.w2 = matmul_tn(tr.hidden, d_out);
    g.params.b2 = column_sums(d_out);
    const Matrix d_pre1 = relu_backward(tr.pre1, matmul_nt(d_out, mlp.w2));
    g.params.w1 = matmul_tn(x, d_pre1);
    g.params.b1 = column_sums(d_pre1);
    g.x = matmul_nt(d_pre1, mlp.w1);
    return g;
}

Prediction pool_and_classify(const Matrix& e_str, const Matrix& e_seq, const Mlp& pred) {
    Matrix joined;
    if (e_str.empty() && e_seq.empty()) throw std::invalid_argument("pool_and_classify: no inputs");
    if (e_str.empty()) joined = e_seq;
    else if (e_seq.empty()) joined = e_str;
    else joined = hconcat(e_str, e_seq);

    Prediction p;
    p.pooled = column_means(joined);
    p.head = mlp_trace(p.pooled, pred);
    if (p.head.out.size() != 1) throw std::invalid_argument("pool_and_classify: head must output a scalar");
    p.logit = p.head.out(0, 0);
    const double sig = 1.0 / (1.0 + std::exp(-p.logit));
    p.prob = std::clamp(sig, kProbFloor, 1.0 - kProbFloor);
    p.clamped = p.prob != sig;
    return p;
}

PoolGrads pool_and_classify_backward(const Matrix& e_str, const Matrix& e_seq, const Mlp& pred,
                                     const Prediction& out, double d_prob) {
    const double d_logit = out.clamped ? 0.0 : d_prob * out.prob * (1.0 - out.prob);
    auto head = mlp_backward(out.pooled, pred, out.head, Matrix(1, 1, d_logit));
    PoolGrads g;
    g.pred = std::move(head.params);
    const std::size_t n = e_str.empty() ? e_seq.rows() : e_str.rows();
    const double inv = 1.0 / static_cast<double>(n);
    std::size_t offset = 0;
    auto spread = [&](const Matrix& e) {
        Matrix d(e.rows(), e.cols());
        for (std::size_t i = 0; i < e.rows(); ++i)
            for (std::size_t j = 0; j < e.cols(); ++j) d(i, j) = head.x(0, offset + j) * inv;
        offset += e.cols();
        return d;
    };
    if (!e_str.empty()) g.e_str = spread(e_str);
    if (!e_seq.empty()) g.e_seq = spread(e_seq);
    return g;
}

double kl_loss(const Matrix& e_str, const Matrix& e_seq) {
    require_same_shape(e_str, e_seq, "kl_loss");
    if (e_str.rows() == 0) throw std::invalid_argument("kl_loss: empty input");
    const double log_floor = std::log(kKlFloor);
    double total = 0.0;
    for (std::size_t i = 0; i < e_str.rows(); ++i) {
        const auto a = e_str.row(i);
        const auto b = e_seq.row(i);
        const double lse_a = log_sum_exp(a);
        const double lse_b = log_sum_exp(b);
        double row = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
            const double log_p = a[j] - lse_a;
            const double log_q = std::max(b[j] - lse_b, log_floor);
            row += std::exp(log_p) * (log_p - log_q);
        }
        total += row;
    }
    // Rounding can push an exact-zero divergence a hair below 0.
    return std::max(0.0, total / static_cast<double>(e_str.rows()));
}

std::pair<Matrix, Matrix> kl_backward(const Matrix& e_str, const Matrix& e_seq, double d_loss) {
    require_same_shape(e_str, e_seq, "kl_backward");
    const double log_floor = std::log(kKlFloor);
    const double scale = d_loss / static_cast<double>(e_str.rows());
    Matrix d_a(e_str.rows(), e_str.cols()), d_b(e_seq.rows(), e_seq.cols());
    const std::size_t h = e_str.cols();
    std::vector<double> p(h), q(h), logp(h), logq(h);
    std::vector<bool> live(h);
    for (std::size_t i = 0; i < e_str.rows(); ++i) {
        const auto a = e_str.row(i);
        const auto b = e_seq.row(i);
        const double lse_a = log_sum_exp(a);
        const double lse_b = log_sum_exp(b);
        double row = 0.0, live_mass = 0.0;
        for (std::size_t j = 0; j < h; ++j) {
            logp[j] = a[j] - lse_a;
            p[j] = std::exp(logp[j]);
            const double raw = b[j] - lse_b;
            live[j] = raw >= log_floor;
            logq[j] = live[j] ? raw : log_floor;
            q[j] = std::exp(raw);
            row += p[j] * (logp[j] - logq[j]);
            if (live[j]) live_mass += p[j];
        }
        for (std::size_t j = 0; j < h; ++j) {
            d_a(i, j) = scale * p[j] * (logp[j] - logq[j] - row);
            d_b(i, j) = scale * (q[j] * live_mass - (live[j] ? p[j] : 0.0));
        }
    }
    return {std::move(d_a), std::move(d_b)};
}

double bce_loss(std::span<const double> probs, std::span<const int> labels) {
    if (probs.size() != labels.size() || probs.empty())
        throw std::invalid_argument("bce_loss: need equal, non-empty probs and labels");
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("bce_loss: probability " + std::to_string(p) +
                                        " outside (0, 1)");
        if (labels[i] != 0 && labels[i] != 1) throw std::invalid_argument("bce_loss: label not 0/1");
        acc += labels[i] == 1 ? -std::log(p) : -std::log(1.0 - p);
    }
    return acc / static_cast<double>(probs.size());
}

std::vector<double> bce_backward(std::span<const double> probs, std::span<const int> labels,
                                 double d_loss) {
    if (probs.size() != labels.size() || probs.empty())
        throw std::invalid_argument("bce_backward: need equal, non-empty probs and labels");
    const double scale = d_loss / static_cast<double>(probs.size());
    std::vector<double> d(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        d[i] = labels[i] == 1 ? -scale / probs[i] : scale / (1.0 - probs[i]);
    return d;
}

}  // namespace bnews
