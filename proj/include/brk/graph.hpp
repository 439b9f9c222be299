#pragma once

#include <cstddef>

#include "brk/embedding.hpp"
#include "brk/matrix.hpp"

namespace bnews {

/// Fully connected bidirectional sentence graph. Entry (s, t) of `adjacency`
/// and `edge_weights` describes the directed edge s -> t (row = source,
/// column = target). The diagonal is always zero; self-contribution is added
/// as an explicit self-loop by the graph encoder.
struct ContentGraph {
    Matrix x_node;        // N x d
    Matrix adjacency;     // N x N, 0/1
    Matrix edge_weights;  // N x N, in [0, 1], masked by adjacency

    std::size_t node_count() const { return x_node.rows(); }
    std::size_t directed_edge_count() const;
};

ContentGraph build_graph(const ArticleFeatures& features);

// Returns a copy of `g` with edge weights replaced by weights ⊙ adjacency.
ContentGraph with_edge_weights(const ContentGraph& g, const Matrix& weights);

}  // namespace bnews
