#pragma once

#include <cstddef>
#include <utility>

#include "brk/graph.hpp"
#include "brk/matrix.hpp"

namespace bnews {

/// Inner-level (structure denoising) parameters; all d x d.
struct DenoiseParams {
    Matrix w_f;
    Matrix w_node;
    Matrix w_seq;

    std::size_t dim() const { return w_f.rows(); }
    void validate() const;
};

struct DenoiseOutput {
    Matrix affinity;      // N x N, tanh(X_node W_F X_seq^T)
    Matrix reference;     // N x d, reference semantics
    Matrix edge_weights;  // N x N inferred weights, zero diagonal
};

Matrix compute_affinity(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p);

Matrix compute_reference(const Matrix& x_node, const Matrix& x_seq, const Matrix& affinity,
                         const DenoiseParams& p);

/// w(s -> t) = clamp(cos(x_node[s], reference[t]), 0, 1) for s != t.
Matrix infer_edge_weights(const Matrix& x_node, const Matrix& reference);

DenoiseOutput denoise(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p);

// Graph with W_e replaced by the inferred weights masked by A.
std::pair<ContentGraph, DenoiseOutput> denoise_graph(const ContentGraph& g, const Matrix& x_seq,
                                                     const DenoiseParams& p);

// Vector-Jacobian products. Arguments named d_* are upstream gradients of a
// scalar loss with respect to the corresponding output.

struct AffinityGrads {
    Matrix w_f, x_node, x_seq;
};
AffinityGrads affinity_backward(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p,
                                const Matrix& affinity, const Matrix& d_affinity);

struct ReferenceGrads {
    Matrix w_node, w_seq, x_node, x_seq, affinity;
};
ReferenceGrads reference_backward(const Matrix& x_node, const Matrix& x_seq,
                                  const Matrix& affinity, const DenoiseParams& p,
                                  const Matrix& reference, const Matrix& d_reference);

struct EdgeWeightGrads {
    Matrix x_node, reference;
};
// The clamp passes gradient only where the raw cosine is strictly inside (0, 1).
EdgeWeightGrads edge_weights_backward(const Matrix& x_node, const Matrix& reference,
                                      const Matrix& d_weights);

struct DenoiseGrads {
    DenoiseParams params;  // gradients shaped like the parameters
    Matrix x_node, x_seq;
};
DenoiseGrads denoise_backward(const Matrix& x_node, const Matrix& x_seq, const DenoiseParams& p,
                              const DenoiseOutput& out, const Matrix& d_weights);

}  // namespace bnews
