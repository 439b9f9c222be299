#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>

#include "brk/denoise.hpp"
#include "brk/embedding.hpp"
#include "brk/encoders.hpp"
#include "brk/param_store.hpp"

namespace bnews {

struct ModelShape {
    std::size_t d = 32;
    std::size_t h = 16;
    std::size_t h_mid = 16;
    std::size_t d_img = 0;  // 0: no image projection
    Ablation ablation = Ablation::full;

    std::size_t classifier_in() const {
        return uses_graph(ablation) && uses_sequence(ablation) ? 2 * h : h;
    }
};

// Parameter names inside a ParamStore. Inner-level entries carry the "phi."
// prefix, outer-level entries "theta.".
namespace param_names {
inline const std::string w_f = "phi.w_f";
inline const std::string w_node = "phi.w_node";
inline const std::string w_seq = "phi.w_seq";
inline const std::string gcn1 = "theta.gcn1";
inline const std::string gcn2 = "theta.gcn2";
inline const std::string seq_w1 = "theta.seq.w1";
inline const std::string seq_b1 = "theta.seq.b1";
inline const std::string seq_w2 = "theta.seq.w2";
inline const std::string seq_b2 = "theta.seq.b2";
inline const std::string pred_w1 = "theta.pred.w1";
inline const std::string pred_b1 = "theta.pred.b1";
inline const std::string pred_w2 = "theta.pred.w2";
inline const std::string pred_b2 = "theta.pred.b2";
inline const std::string image_proj = "theta.image_proj";
}  // namespace param_names

// Glorot-uniform weights, zero biases.
ParamStore init_params(const ModelShape& shape, std::uint64_t seed);

std::set<std::string> phi_names(const ParamStore& store);
std::set<std::string> theta_names(const ParamStore& store);

DenoiseParams denoise_params(const ParamStore& store);
ModelParams model_params(const ParamStore& store);

struct Vectorizers {
    SentenceVectorizer node;
    SentenceVectorizer seq;
};

struct ForwardOutput {
    Matrix e_str;  // N x h (empty for no_gra)
    Matrix e_seq;  // N x h (empty for no_seq)
    Matrix pooled;
    double prob = 0.5;
    double loss_cls = 0.0;
    double loss_kl = 0.0;
};

/// Everything the backward pass needs from one article's forward pass.
struct ModelTrace {
    Ablation ablation = Ablation::full;
    int label = 0;
    ArticleFeatures features;
    Matrix edge_weights;                  // weights the graph encoder used
    std::optional<DenoiseOutput> denoise; // present when inference ran
    GcnTrace gcn;
    MlpTrace seq;
    Prediction pred;
    double loss_cls = 0.0;
    double loss_kl = 0.0;

    ForwardOutput output() const;
};

/// Forward pass over an already-vectorized article. `edge_override`, when
/// given, replaces the graph encoder's weights and skips inference.
ModelTrace forward_encoded(const EncodedArticle& article, const DenoiseParams& phi,
                           const ModelParams& theta, Ablation ablation,
                           const Matrix* edge_override = nullptr);

struct ModelGrads {
    DenoiseParams phi;
    ModelParams theta;
    Matrix x_node, x_seq;  // gradients w.r.t. the projected features
};

// Gradient of d_cls * loss_cls + d_kl * loss_kl for one article.
ModelGrads model_backward(const EncodedArticle& article, const DenoiseParams& phi,
                          const ModelParams& theta, const ModelTrace& trace, double d_cls,
                          double d_kl);

// Adds the gradients into the matching store entries.
void accumulate_grads(ParamStore& store, const ModelGrads& g);

ForwardOutput model_forward(const NewsArticle& article, const Vectorizers& vectorizers,
                            const DenoiseParams& phi, const ModelParams& theta,
                            Ablation ablation);

}  // namespace bnews
