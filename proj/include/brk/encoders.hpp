#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "brk/graph.hpp"
#include "brk/matrix.hpp"

namespace bnews {

// Probabilities leave the classifier clamped to [kProbFloor, 1 - kProbFloor].
inline constexpr double kProbFloor = 1e-7;
// Lower clamp applied to the second distribution inside the KL term.
inline constexpr double kKlFloor = 1e-12;

enum class Ablation { full, no_inf, no_seq, no_gra };

std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view s);

// Classifier input width: both encoders for full / no_inf, one otherwise.
inline bool uses_graph(Ablation a) { return a != Ablation::no_gra; }
inline bool uses_sequence(Ablation a) { return a != Ablation::no_seq; }
inline bool uses_inference(Ablation a) { return a == Ablation::full || a == Ablation::no_seq; }

/// Two-layer perceptron: relu(X W1 + b1) W2 + b2. Biases are 1 x k.
struct Mlp {
    Matrix w1, b1, w2, b2;

    std::size_t in_dim() const { return w1.rows(); }
    std::size_t out_dim() const { return w2.cols(); }
    void validate() const;
};

/// Outer-level parameters.
struct ModelParams {
    Matrix gcn1;  // d x h
    Matrix gcn2;  // h x h
    Mlp seq;      // d -> h
    Mlp pred;     // (2h or h) -> 1
    std::optional<Matrix> image_proj;  // d_img x d
};

// ---- graph encoder -------------------------------------------------------

// Incoming-edge aggregation with a unit self-loop, normalized by the weighted
// in-degree: out[t] = (h[t] + sum_s w(s->t) h[s]) / (1 + sum_s w(s->t)).
Matrix aggregate_incoming(const Matrix& edge_weights, const Matrix& h,
                          std::vector<double>* degree = nullptr);

struct GcnTrace {
    std::vector<double> degree;
    Matrix agg1, pre1, h1, agg2, pre2, out;
};

GcnTrace gcn_trace(const Matrix& edge_weights, const Matrix& x, const Matrix& w1,
                   const Matrix& w2);

// Two weighted GCN layers with relu and no biases.
Matrix gcn_forward(const ContentGraph& g, const Matrix& w1, const Matrix& w2);
Matrix gcn_forward(const ContentGraph& g, const ModelParams& params);

struct GcnGrads {
    Matrix w1, w2, x, edge_weights;
};
GcnGrads gcn_backward(const Matrix& edge_weights, const Matrix& x, const Matrix& w1,
                      const Matrix& w2, const GcnTrace& trace, const Matrix& d_out);

// ---- perceptrons ---------------------------------------------------------

struct MlpTrace {
    Matrix pre1, hidden, out;
};

MlpTrace mlp_trace(const Matrix& x, const Mlp& mlp);
Matrix mlp_forward(const Matrix& x, const Mlp& mlp);

struct MlpGrads {
    Mlp params;
    Matrix x;
};
MlpGrads mlp_backward(const Matrix& x, const Mlp& mlp, const MlpTrace& trace,
                      const Matrix& d_out);

// ---- readout -------------------------------------------------------------

struct Prediction {
    Matrix pooled;  // 1 x in_dim
    MlpTrace head;
    double logit = 0.0;
    double prob = 0.5;
    bool clamped = false;
};

/// Concatenates the node-level encodings, mean-pools over nodes and applies
/// the prediction head followed by the logistic function. Either encoding
/// may be passed as an empty matrix to drop it from the concatenation.
Prediction pool_and_classify(const Matrix& e_str, const Matrix& e_seq, const Mlp& pred);

struct PoolGrads {
    Mlp pred;
    Matrix e_str, e_seq;  // empty when the corresponding input was empty
};
PoolGrads pool_and_classify_backward(const Matrix& e_str, const Matrix& e_seq, const Mlp& pred,
                                     const Prediction& out, double d_prob);

// ---- losses --------------------------------------------------------------

/// Mean over rows of KL(softmax(e_str[i]) || softmax(e_seq[i])).
double kl_loss(const Matrix& e_str, const Matrix& e_seq);
std::pair<Matrix, Matrix> kl_backward(const Matrix& e_str, const Matrix& e_seq, double d_loss);

/// Mean binary cross-entropy.
double bce_loss(std::span<const double> probs, std::span<const int> labels);
std::vector<double> bce_backward(std::span<const double> probs, std::span<const int> labels,
                                 double d_loss);

}  // namespace bnews
