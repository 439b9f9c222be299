#include "brk/gradcheck_suite.hpp"

#include <functional>

#include "brk/denoise.hpp"
#include "brk/encoders.hpp"
#include "brk/model.hpp"
#include "brk/rng.hpp"

namespace bnews {

namespace {

constexpr std::size_t kNodes = 3;
constexpr std::size_t kDim = 8;
constexpr std::size_t kHidden = 4;
constexpr double kBeta = 0.1;

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (double& x : m.data()) x = rng.uniform(lo, hi);
    return m;
}

// Weighted sum <probe, out>: a generic scalar read-out that exercises every
// output entry with a distinct upstream gradient.
double weighted_sum(const Matrix& probe, const Matrix& out) {
    return dot(probe.data(), out.data());
}

using GradFn = std::function<void(ParamStore&)>;

NamedGradCheck check(std::string name, ParamStore store, const ScalarFn& fn, const GradFn& grads,
                     const GradCheckOptions& opts) {
    store.zero_grads();
    grads(store);
    return {std::move(name), grad_check(fn, store, opts)};
}

DenoiseParams phi_of(const ParamStore& s) {
    return {s.value("w_f"), s.value("w_node"), s.value("w_seq")};
}

Mlp mlp_of(const ParamStore& s, const std::string& p) {
    return {s.value(p + "w1"), s.value(p + "b1"), s.value(p + "w2"), s.value(p + "b2")};
}

void add_mlp(ParamStore& s, const std::string& p, std::size_t in, std::size_t mid, std::size_t out,
             Rng& rng) {
    s.add(p + "w1", random_matrix(in, mid, rng));
    s.add(p + "b1", random_matrix(1, mid, rng, -0.2, 0.2));
    s.add(p + "w2", random_matrix(mid, out, rng));
    s.add(p + "b2", random_matrix(1, out, rng, -0.2, 0.2));
}

void add_mlp_grads(ParamStore& s, const std::string& p, const Mlp& g) {
    s.accumulate_grad(p + "w1", g.w1);
    s.accumulate_grad(p + "b1", g.b1);
    s.accumulate_grad(p + "w2", g.w2);
    s.accumulate_grad(p + "b2", g.b2);
}

EncodedArticle sample_article(std::size_t sentences, std::size_t images, std::size_t d_img,
                              Rng& rng) {
    static const char* kText[] = {"officials confirmed the new health bill on monday",
                                  "critics say the eligibility rules were quietly changed",
                                  "the report cites an anonymous insider source",
                                  "photos circulated widely online"};
    NewsArticle a;
    a.id = "gradcheck";
    a.label = 1;
    for (std::size_t i = 0; i < sentences; ++i) a.sentences.emplace_back(kText[i % 4]);
    for (std::size_t i = 0; i < images; ++i) {
        std::vector<double> v(d_img);
        for (double& x : v) x = rng.uniform(-1.0, 1.0);
        a.image_vectors.push_back(std::move(v));
    }
    const auto node = SentenceVectorizer::hash(11, kDim);
    const auto seq = SentenceVectorizer::hash(29, kDim);
    return encode_article(a, node, seq);
}

NamedGradCheck check_model(const std::string& name, Ablation ablation, std::size_t images,
                           std::uint64_t seed, const GradCheckOptions& opts) {
    Rng rng(seed);
    const std::size_t d_img = images > 0 ? 5 : 0;
    const auto article = sample_article(kNodes - images, images, d_img, rng);
    ParamStore store = init_params({kDim, kHidden, kHidden, d_img, ablation}, seed);
    // Non-zero biases keep relu units away from exact ties.
    for (const auto& n : store.names())
        if (n.ends_with(".b1") || n.ends_with(".b2"))
            for (double& x : store.value(n).data()) x = rng.uniform(-0.1, 0.1);

    auto fn = [&](const ParamStore& s) {
        auto tr = forward_encoded(article, denoise_params(s), model_params(s), ablation);
        return tr.loss_cls + kBeta * tr.loss_kl;
    };
    auto grads = [&](ParamStore& s) {
        const auto phi = denoise_params(s);
        const auto theta = model_params(s);
        auto tr = forward_encoded(article, phi, theta, ablation);
        accumulate_grads(s, model_backward(article, phi, theta, tr, 1.0, kBeta));
    };
    return check(name, store, fn, grads, opts);
}

}  // namespace

std::vector<NamedGradCheck> run_gradcheck_suite(std::uint64_t seed, const GradCheckOptions& opts) {
    std::vector<NamedGradCheck> out;
    Rng rng(seed);

    {  // affinity
        ParamStore s;
        s.add("x_node", random_matrix(kNodes, kDim, rng));
        s.add("x_seq", random_matrix(kNodes, kDim, rng));
        s.add("w_f", random_matrix(kDim, kDim, rng, -0.4, 0.4));
        s.add("w_node", Matrix(kDim, kDim));
        s.add("w_seq", Matrix(kDim, kDim));
        const Matrix probe = random_matrix(kNodes, kNodes, rng);
        out.push_back(check(
            "compute_affinity", s,
            [&](const ParamStore& p) {
                return weighted_sum(probe, compute_affinity(p.value("x_node"), p.value("x_seq"), phi_of(p)));
            },
            [&](ParamStore& p) {
                const auto phi = phi_of(p);
                const auto f = compute_affinity(p.value("x_node"), p.value("x_seq"), phi);
                auto g = affinity_backward(p.value("x_node"), p.value("x_seq"), phi, f, probe);
                p.accumulate_grad("x_node", g.x_node);
                p.accumulate_grad("x_seq", g.x_seq);
                p.accumulate_grad("w_f", g.w_f);
            },
            opts));
    }

    {  // reference semantics
        ParamStore s;
        s.add("x_node", random_matrix(kNodes, kDim, rng));
        s.add("x_seq", random_matrix(kNodes, kDim, rng));
        s.add("affinity", random_matrix(kNodes, kNodes, rng, -0.9, 0.9));
        s.add("w_f", Matrix(kDim, kDim));
        s.add("w_node", random_matrix(kDim, kDim, rng, -0.4, 0.4));
        s.add("w_seq", random_matrix(kDim, kDim, rng, -0.4, 0.4));
        const Matrix probe = random_matrix(kNodes, kDim, rng);
        out.push_back(check(
            "compute_reference", s,
            [&](const ParamStore& p) {
                return weighted_sum(probe, compute_reference(p.value("x_node"), p.value("x_seq"),
                                                             p.value("affinity"), phi_of(p)));
            },
            [&](ParamStore& p) {
                const auto phi = phi_of(p);
                const auto r = compute_reference(p.value("x_node"), p.value("x_seq"), p.value("affinity"), phi);
                auto g = reference_backward(p.value("x_node"), p.value("x_seq"), p.value("affinity"),
                                            phi, r, probe);
                p.accumulate_grad("x_node", g.x_node);
                p.accumulate_grad("x_seq", g.x_seq);
                p.accumulate_grad("affinity", g.affinity);
                p.accumulate_grad("w_node", g.w_node);
                p.accumulate_grad("w_seq", g.w_seq);
            },
            opts));
    }

    {  // edge weight inference; positive inputs keep most cosines inside (0, 1)
        ParamStore s;
        s.add("x_node", random_matrix(kNodes, kDim, rng, -0.3, 1.0));
        s.add("reference", random_matrix(kNodes, kDim, rng, -0.3, 1.0));
        const Matrix probe = random_matrix(kNodes, kNodes, rng);
        out.push_back(check(
            "infer_edge_weights", s,
            [&](const ParamStore& p) {
                return weighted_sum(probe, infer_edge_weights(p.value("x_node"), p.value("reference")));
            },
            [&](ParamStore& p) {
                auto g = edge_weights_backward(p.value("x_node"), p.value("reference"), probe);
                p.accumulate_grad("x_node", g.x_node);
                p.accumulate_grad("reference", g.reference);
            },
            opts));
    }

    {  // composed denoising pass
        ParamStore s;
        s.add("x_node", random_matrix(kNodes, kDim, rng, -0.3, 1.0));
        s.add("x_seq", random_matrix(kNodes, kDim, rng, -0.3, 1.0));
        s.add("w_f", random_matrix(kDim, kDim, rng, -0.4, 0.4));
        Matrix wn = Matrix::identity(kDim) + random_matrix(kDim, kDim, rng, -0.2, 0.2);
        s.add("w_node", wn);
        s.add("w_seq", random_matrix(kDim, kDim, rng, -0.4, 0.4));
        const Matrix probe = random_matrix(kNodes, kNodes, rng);
        out.push_back(check(
            "denoise_graph", s,
            [&](const ParamStore& p) {
                return weighted_sum(probe, denoise(p.value("x_node"), p.value("x_seq"), phi_of(p)).edge_weights);
            },
            [&](ParamStore& p) {
                const auto phi = phi_of(p);
                const auto o = denoise(p.value("x_node"), p.value("x_seq"), phi);
                auto g = denoise_backward(p.value("x_node"), p.value("x_seq"), phi, o, probe);
                p.accumulate_grad("x_node", g.x_node);
                p.accumulate_grad("x_seq", g.x_seq);
                p.accumulate_grad("w_f", g.params.w_f);
                p.accumulate_grad("w_node", g.params.w_node);
                p.accumulate_grad("w_seq", g.params.w_seq);
            },
            opts));
    }

    {  // weighted GCN
        ParamStore s;
        s.add("x", random_matrix(kNodes, kDim, rng));
        Matrix w = random_matrix(kNodes, kNodes, rng, 0.1, 0.9);
        for (std::size_t i = 0; i < kNodes; ++i) w(i, i) = 0.0;
        s.add("edge_weights", w);
        s.add("w1", random_matrix(kDim, kHidden, rng));
        s.add("w2", random_matrix(kHidden, kHidden, rng));
        const Matrix probe = random_matrix(kNodes, kHidden, rng);
        out.push_back(check(
            "gcn_forward", s,
            [&](const ParamStore& p) {
                return weighted_sum(probe, gcn_trace(p.value("edge_weights"), p.value("x"), p.value("w1"),
                                                     p.value("w2")).out);
            },
            [&](ParamStore& p) {
                const auto tr = gcn_trace(p.value("edge_weights"), p.value("x"), p.value("w1"), p.value("w2"));
                auto g = gcn_backward(p.value("edge_weights"), p.value("x"), p.value("w1"), p.value("w2"),
                                      tr, probe);
                p.accumulate_grad("x", g.x);
                p.accumulate_grad("edge_weights", g.edge_weights);
                p.accumulate_grad("w1", g.w1);
                p.accumulate_grad("w2", g.w2);
            },
            opts));
    }

    {  // sequence MLP
        ParamStore s;
        s.add("x", random_matrix(kNodes, kDim, rng));
        add_mlp(s, "seq.", kDim, kHidden, kHidden, rng);
        const Matrix probe = random_matrix(kNodes, kHidden, rng);
        out.push_back(check(
            "mlp_forward", s,
            [&](const ParamStore& p) { return weighted_sum(probe, mlp_forward(p.value("x"), mlp_of(p, "seq."))); },
            [&](ParamStore& p) {
                const auto mlp = mlp_of(p, "seq.");
                const auto tr = mlp_trace(p.value("x"), mlp);
                auto g = mlp_backward(p.value("x"), mlp, tr, probe);
                p.accumulate_grad("x", g.x);
                add_mlp_grads(p, "seq.", g.params);
            },
            opts));
    }

    {  // pooling + prediction head
        ParamStore s;
        s.add("e_str", random_matrix(kNodes, kHidden, rng, 0.0, 1.0));
        s.add("e_seq", random_matrix(kNodes, kHidden, rng));
        add_mlp(s, "pred.", 2 * kHidden, kHidden, 1, rng);
        out.push_back(check(
            "pool_and_classify", s,
            [&](const ParamStore& p) {
                return pool_and_classify(p.value("e_str"), p.value("e_seq"), mlp_of(p, "pred.")).prob;
            },
            [&](ParamStore& p) {
                const auto mlp = mlp_of(p, "pred.");
                const auto pr = pool_and_classify(p.value("e_str"), p.value("e_seq"), mlp);
                auto g = pool_and_classify_backward(p.value("e_str"), p.value("e_seq"), mlp, pr, 1.0);
                p.accumulate_grad("e_str", g.e_str);
                p.accumulate_grad("e_seq", g.e_seq);
                add_mlp_grads(p, "pred.", g.pred);
            },
            opts));
    }

    {  // KL alignment
        ParamStore s;
        s.add("e_str", random_matrix(kNodes, kHidden, rng, -2.0, 2.0));
        s.add("e_seq", random_matrix(kNodes, kHidden, rng, -2.0, 2.0));
        out.push_back(check(
            "kl_loss", s, [&](const ParamStore& p) { return kl_loss(p.value("e_str"), p.value("e_seq")); },
            [&](ParamStore& p) {
                auto [a, b] = kl_backward(p.value("e_str"), p.value("e_seq"), 1.0);
                p.accumulate_grad("e_str", a);
                p.accumulate_grad("e_seq", b);
            },
            opts));
    }

    {  // binary cross-entropy
        ParamStore s;
        s.add("probs", random_matrix(1, 4, rng, 0.05, 0.95));
        const std::vector<int> labels = {1, 0, 1, 0};
        out.push_back(check(
            "bce_loss", s, [&](const ParamStore& p) { return bce_loss(p.value("probs").data(), labels); },
            [&](ParamStore& p) {
                const auto d = bce_backward(p.value("probs").data(), labels, 1.0);
                p.accumulate_grad("probs", Matrix::row_vector(d));
            },
            opts));
    }

    out.push_back(check_model("model_loss[full]", Ablation::full, 0, seed + 1, opts));
    out.push_back(check_model("model_loss[full,image]", Ablation::full, 1, seed + 2, opts));
    out.push_back(check_model("model_loss[no_inf]", Ablation::no_inf, 0, seed + 3, opts));
    out.push_back(check_model("model_loss[no_seq]", Ablation::no_seq, 0, seed + 4, opts));
    out.push_back(check_model("model_loss[no_gra]", Ablation::no_gra, 1, seed + 5, opts));
    return out;
}

}  // namespace bnews
