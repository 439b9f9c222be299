#include "brk/model.hpp"

#include <cmath>
#include <stdexcept>

#include "brk/rng.hpp"

namespace bnews {

namespace {

namespace pn = param_names;

Matrix glorot(std::size_t rows, std::size_t cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (double& x : m.data()) x = rng.uniform(-limit, limit);
    return m;
}

Matrix zeros_like(const Matrix& m) { return Matrix(m.rows(), m.cols()); }

Mlp zeros_like(const Mlp& m) {
    return {zeros_like(m.w1), zeros_like(m.b1), zeros_like(m.w2), zeros_like(m.b2)};
}

Matrix rows_from(const Matrix& m, std::size_t begin) {
    Matrix out(m.rows() - begin, m.cols());
    for (std::size_t i = begin; i < m.rows(); ++i)
        std::copy(m.row(i).begin(), m.row(i).end(), out.row(i - begin).begin());
    return out;
}

bool has_prefix(const std::string& s, std::string_view prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

ParamStore init_params(const ModelShape& shape, std::uint64_t seed) {
    if (shape.d == 0 || shape.h == 0 || shape.h_mid == 0)
        throw std::invalid_argument("init_params: dimensions must be positive");
    Rng rng(seed);
    ParamStore store;
    const std::size_t d = shape.d, h = shape.h, mid = shape.h_mid;
    store.add(pn::w_f, glorot(d, d, rng));
    store.add(pn::w_node, glorot(d, d, rng));
    store.add(pn::w_seq, glorot(d, d, rng));
    store.add(pn::gcn1, glorot(d, h, rng));
    store.add(pn::gcn2, glorot(h, h, rng));
    store.add(pn::seq_w1, glorot(d, mid, rng));
    store.add(pn::seq_b1, Matrix(1, mid));
    store.add(pn::seq_w2, glorot(mid, h, rng));
    store.add(pn::seq_b2, Matrix(1, h));
    store.add(pn::pred_w1, glorot(shape.classifier_in(), mid, rng));
    store.add(pn::pred_b1, Matrix(1, mid));
    store.add(pn::pred_w2, glorot(mid, 1, rng));
    store.add(pn::pred_b2, Matrix(1, 1));
    if (shape.d_img > 0) store.add(pn::image_proj, glorot(shape.d_img, d, rng));
    return store;
}

std::set<std::string> phi_names(const ParamStore& store) {
    std::set<std::string> out;
    for (const auto& name : store.names())
        if (has_prefix(name, "phi.")) out.insert(name);
    return out;
}

std::set<std::string> theta_names(const ParamStore& store) {
    std::set<std::string> out;
    for (const auto& name : store.names())
        if (has_prefix(name, "theta.")) out.insert(name);
    return out;
}

DenoiseParams denoise_params(const ParamStore& store) {
    return {store.value(pn::w_f), store.value(pn::w_node), store.value(pn::w_seq)};
}

ModelParams model_params(const ParamStore& store) {
    ModelParams p;
    p.gcn1 = store.value(pn::gcn1);
    p.gcn2 = store.value(pn::gcn2);
    p.seq = {store.value(pn::seq_w1), store.value(pn::seq_b1), store.value(pn::seq_w2),
             store.value(pn::seq_b2)};
    p.pred = {store.value(pn::pred_w1), store.value(pn::pred_b1), store.value(pn::pred_w2),
              store.value(pn::pred_b2)};
    if (store.contains(pn::image_proj)) p.image_proj = store.value(pn::image_proj);
    return p;
}

ForwardOutput ModelTrace::output() const {
    ForwardOutput o;
    if (uses_graph(ablation)) o.e_str = gcn.out;
    if (uses_sequence(ablation)) o.e_seq = seq.out;
    o.pooled = pred.pooled;
    o.prob = pred.prob;
    o.loss_cls = loss_cls;
    o.loss_kl = loss_kl;
    return o;
}

ModelTrace forward_encoded(const EncodedArticle& article, const DenoiseParams& phi,
                           const ModelParams& theta, Ablation ablation,
                           const Matrix* edge_override) {
    ModelTrace tr;
    tr.ablation = ablation;
    tr.label = article.label;
    tr.features = project_features(article, theta.image_proj);
    const Matrix& x_node = tr.features.x_node;
    const Matrix& x_seq = tr.features.x_seq;
    const std::size_t n = x_node.rows();

    Matrix e_str, e_seq;
    if (uses_graph(ablation)) {
        if (edge_override) {
            if (edge_override->rows() != n || edge_override->cols() != n)
                throw std::invalid_argument("edge override is " + shape_string(*edge_override));
            tr.edge_weights = *edge_override;
            for (std::size_t i = 0; i < n; ++i) tr.edge_weights(i, i) = 0.0;
        } else if (uses_inference(ablation)) {
            // Without a sequence encoder the node channel stands in for X_seq.
            const Matrix& reference_seq = uses_sequence(ablation) ? x_seq : x_node;
            tr.denoise = denoise(x_node, reference_seq, phi);
            tr.edge_weights = tr.denoise->edge_weights;
        } else {
            tr.edge_weights = Matrix(n, n, 1.0);
            for (std::size_t i = 0; i < n; ++i) tr.edge_weights(i, i) = 0.0;
        }
        tr.gcn = gcn_trace(tr.edge_weights, x_node, theta.gcn1, theta.gcn2);
        e_str = tr.gcn.out;
    }
    if (uses_sequence(ablation)) {
        tr.seq = mlp_trace(x_seq, theta.seq);
        e_seq = tr.seq.out;
    }
    tr.pred = pool_and_classify(e_str, e_seq, theta.pred);
    const double prob[] = {tr.pred.prob};
    const int label[] = {article.label};
    tr.loss_cls = bce_loss(prob, label);
    tr.loss_kl = uses_graph(ablation) && uses_sequence(ablation) ? kl_loss(e_str, e_seq) : 0.0;
    return tr;
}

ModelGrads model_backward(const EncodedArticle& article, const DenoiseParams& phi,
                          const ModelParams& theta, const ModelTrace& tr, double d_cls,
                          double d_kl) {
    const Ablation ab = tr.ablation;
    const Matrix& x_node = tr.features.x_node;
    const Matrix& x_seq = tr.features.x_seq;

    ModelGrads g;
    g.phi = {zeros_like(phi.w_f), zeros_like(phi.w_node), zeros_like(phi.w_seq)};
    g.theta.gcn1 = zeros_like(theta.gcn1);
    g.theta.gcn2 = zeros_like(theta.gcn2);
    g.theta.seq = zeros_like(theta.seq);
    if (theta.image_proj) g.theta.image_proj = zeros_like(*theta.image_proj);
    g.x_node = zeros_like(x_node);
    g.x_seq = zeros_like(x_seq);

    const double prob[] = {tr.pred.prob};
    const int label[] = {tr.label};
    const double d_prob = bce_backward(prob, label, d_cls)[0];

    const Matrix empty;
    const Matrix& e_str = uses_graph(ab) ? tr.gcn.out : empty;
    const Matrix& e_seq = uses_sequence(ab) ? tr.seq.out : empty;
    auto pool = pool_and_classify_backward(e_str, e_seq, theta.pred, tr.pred, d_prob);
    g.theta.pred = std::move(pool.pred);

    Matrix d_str = std::move(pool.e_str);
    Matrix d_seq = std::move(pool.e_seq);
    if (uses_graph(ab) && uses_sequence(ab) && d_kl != 0.0) {
        auto [ka, kb] = kl_backward(e_str, e_seq, d_kl);
        d_str += ka;
        d_seq += kb;
    }

    if (uses_sequence(ab)) {
        auto mg = mlp_backward(x_seq, theta.seq, tr.seq, d_seq);
        g.theta.seq = std::move(mg.params);
        g.x_seq += mg.x;
    }

    if (uses_graph(ab)) {
        auto gg = gcn_backward(tr.edge_weights, x_node, theta.gcn1, theta.gcn2, tr.gcn, d_str);
        g.theta.gcn1 = std::move(gg.w1);
        g.theta.gcn2 = std::move(gg.w2);
        g.x_node += gg.x;
        if (tr.denoise) {
            const Matrix& reference_seq = uses_sequence(ab) ? x_seq : x_node;
            auto dg = denoise_backward(x_node, reference_seq, phi, *tr.denoise, gg.edge_weights);
            g.phi = std::move(dg.params);
            g.x_node += dg.x_node;
            (uses_sequence(ab) ? g.x_seq : g.x_node) += dg.x_seq;
        }
    }

    if (theta.image_proj && article.images.rows() > 0) {
        const std::size_t m = tr.features.sentence_count;
        Matrix d_proj = rows_from(g.x_node, m);
        d_proj += rows_from(g.x_seq, m);
        *g.theta.image_proj = matmul_tn(article.images, d_proj);
    }
    return g;
}

void accumulate_grads(ParamStore& store, const ModelGrads& g) {
    store.accumulate_grad(pn::w_f, g.phi.w_f);
    store.accumulate_grad(pn::w_node, g.phi.w_node);
    store.accumulate_grad(pn::w_seq, g.phi.w_seq);
    store.accumulate_grad(pn::gcn1, g.theta.gcn1);
    store.accumulate_grad(pn::gcn2, g.theta.gcn2);
    store.accumulate_grad(pn::seq_w1, g.theta.seq.w1);
    store.accumulate_grad(pn::seq_b1, g.theta.seq.b1);
    store.accumulate_grad(pn::seq_w2, g.theta.seq.w2);
    store.accumulate_grad(pn::seq_b2, g.theta.seq.b2);
    store.accumulate_grad(pn::pred_w1, g.theta.pred.w1);
    store.accumulate_grad(pn::pred_b1, g.theta.pred.b1);
    store.accumulate_grad(pn::pred_w2, g.theta.pred.w2);
    store.accumulate_grad(pn::pred_b2, g.theta.pred.b2);
    if (g.theta.image_proj && store.contains(pn::image_proj))
        store.accumulate_grad(pn::image_proj, *g.theta.image_proj);
}

ForwardOutput model_forward(const NewsArticle& article, const Vectorizers& vectorizers,
                            const DenoiseParams& phi, const ModelParams& theta,
                            Ablation ablation) {
    const auto encoded = encode_article(article, vectorizers.node, vectorizers.seq);
    return forward_encoded(encoded, phi, theta, ablation).output();
}

}  // namespace bnews
