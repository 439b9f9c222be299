#include "brk/denoise.hpp"

#include <stdexcept>
#include <string>

namespace bnews {

namespace {

void check_inputs(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p) {
    p.validate();
    require_same_shape(x_node, x_seq, "denoise inputs");
    if (x_node.cols() != p.dim())
        throw std::invalid_argument("denoise: feature dim " + std::to_string(x_node.cols()) +
                                    " does not match parameter dim " + std::to_string(p.dim()));
}

// 1 - tanh^2 applied to an already-squashed matrix, times the upstream gradient.
Matrix tanh_backward(const Matrix& squashed, const Matrix& upstream) {
    require_same_shape(squashed, upstream, "tanh_backward");
    Matrix out = upstream;
    auto o = out.data();
    auto s = squashed.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] *= 1.0 - s[i] * s[i];
    return out;
}

}  // namespace

void DenoiseParams::validate() const {
    const std::size_t d = w_f.rows();
    for (const Matrix* m : {&w_f, &w_node, &w_seq})
        if (m->rows() != d || m->cols() != d)
            throw std::invalid_argument("DenoiseParams: expected " + std::to_string(d) + "x" +
                                        std::to_string(d) + ", got " + shape_string(*m));
}

Matrix compute_affinity(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p) {
    check_inputs(x_node, x_seq, p);
    return tanh(matmul_nt(matmul(x_node, p.w_f), x_seq));
}

Matrix compute_reference(const Matrix& x_node, const Matrix& x_seq, const Matrix& affinity,
                         const DenoiseParams& p) {
    check_inputs(x_node, x_seq, p);
    if (affinity.rows() != x_node.rows() || affinity.cols() != x_seq.rows())
        throw std::invalid_argument("compute_reference: affinity is " + shape_string(affinity));
    return tanh(matmul(x_node, p.w_node) + matmul(affinity, matmul(x_seq, p.w_seq)));
}

Matrix infer_edge_weights(const Matrix& x_node, const Matrix& reference) {
    require_same_shape(x_node, reference, "infer_edge_weights");
    const std::size_t n = x_node.rows();
    Matrix w(n, n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t) continue;
            const double c = cosine(x_node.row(s), reference.row(t));
            w(s, t) = c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
        }
    return w;
}

DenoiseOutput denoise(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p) {
    DenoiseOutput out;
    out.affinity = compute_affinity(x_node, x_seq, p);
    out.reference = compute_reference(x_node, x_seq, out.affinity, p);
    out.edge_weights = infer_edge_weights(x_node, out.reference);
    return out;
}

std::pair<ContentGraph, DenoiseOutput> denoise_graph(const ContentGraph& g, const Matrix& x_seq,
                                                     const DenoiseParams& p) {
    auto out = denoise(g.x_node, x_seq, p);
    auto graph = with_edge_weights(g, out.edge_weights);
    return {std::move(graph), std::move(out)};
}

AffinityGrads affinity_backward(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p,
                                const Matrix& affinity, const Matrix& d_affinity) {
    const Matrix d_pre = tanh_backward(affinity, d_affinity);  // N x N
    const Matrix proj = matmul(x_node, p.w_f);                  // N x d
    const Matrix d_proj = matmul(d_pre, x_seq);                 // N x d
    AffinityGrads g;
    g.x_seq = matmul_tn(d_pre, proj);
    g.w_f = matmul_tn(x_node, d_proj);
    g.x_node = matmul_nt(d_proj, p.w_f);
    return g;
}

ReferenceGrads reference_backward(const Matrix& x_node, const Matrix& x_seq,
                                  const Matrix& affinity, const DenoiseParams& p,
                                  const Matrix& reference, const Matrix& d_reference) {
    const Matrix d_pre = tanh_backward(reference, d_reference);  // N x d
    const Matrix seq_proj = matmul(x_seq, p.w_seq);              // N x d
    const Matrix d_seq_proj = matmul_tn(affinity, d_pre);        // N x d
    ReferenceGrads g;
    g.w_node = matmul_tn(x_node, d_pre);
    g.x_node = matmul_nt(d_pre, p.w_node);
    g.affinity = matmul_nt(d_pre, seq_proj);
    g.w_seq = matmul_tn(x_seq, d_seq_proj);
    g.x_seq = matmul_nt(d_seq_proj, p.w_seq);
    return g;
}

EdgeWeightGrads edge_weights_backward(const Matrix& x_node, const Matrix& reference,
                                      const Matrix& d_weights) {
    require_same_shape(x_node, reference, "edge_weights_backward");
    const std::size_t n = x_node.rows();
    const std::size_t d = x_node.cols();
    if (d_weights.rows() != n || d_weights.cols() != n)
        throw std::invalid_argument("edge_weights_backward: upstream is " + shape_string(d_weights));
    EdgeWeightGrads g{Matrix(n, d), Matrix(n, d)};
    std::vector<double> norm_x(n), norm_r(n);
    for (std::size_t i = 0; i < n; ++i) {
        norm_x[i] = l2_norm(x_node.row(i));
        norm_r[i] = l2_norm(reference.row(i));
    }
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            if (s == t || norm_x[s] == 0.0 || norm_r[t] == 0.0) continue;
            const double up = d_weights(s, t);
            if (up == 0.0) continue;
            const auto a = x_node.row(s);
            const auto b = reference.row(t);
            const double inv = 1.0 / (norm_x[s] * norm_r[t]);
            const double c = dot(a, b) * inv;
            if (!(c > 0.0 && c < 1.0)) continue;
            const double ca = c / (norm_x[s] * norm_x[s]);
            const double cb = c / (norm_r[t] * norm_r[t]);
            auto gx = g.x_node.row(s);
            auto gr = g.reference.row(t);
            for (std::size_t k = 0; k < d; ++k) {
                gx[k] += up * (b[k] * inv - ca * a[k]);
                gr[k] += up * (a[k] * inv - cb * b[k]);
            }
        }
    return g;
}

DenoiseGrads denoise_backward(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p,
                              const DenoiseOutput& out, const Matrix& d_weights) {
    auto eg = edge_weights_backward(x_node, out.reference, d_weights);
    auto rg = reference_backward(x_node, x_seq, out.affinity, p, out.reference, eg.reference);
    auto ag = affinity_backward(x_node, x_seq, p, out.affinity, rg.affinity);
    DenoiseGrads g;
    g.params.w_f = std::move(ag.w_f);
    g.params.w_node = std::move(rg.w_node);
    g.params.w_seq = std::move(rg.w_seq);
    g.x_node = eg.x_node;
    g.x_node += rg.x_node;
    g.x_node += ag.x_node;
    g.x_seq = rg.x_seq;
    g.x_seq += ag.x_seq;
    return g;
}

}  // namespace bnews
