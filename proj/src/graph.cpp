#include "brk/graph.hpp"

#include <stdexcept>

namespace bnews {

std::size_t ContentGraph::directed_edge_count() const {
    std::size_t n = 0;
    for (double a : adjacency.data()) n += a != 0.0 ? 1 : 0;
    return n;
}

ContentGraph build_graph(const ArticleFeatures& features) {
    const std::size_t n = features.x_node.rows();
    if (n == 0) throw std::invalid_argument("build_graph: article has no nodes");
    ContentGraph g;
    g.x_node = features.x_node;
    g.adjacency = Matrix(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i) g.adjacency(i, i) = 0.0;
    g.edge_weights = g.adjacency;
    return g;
}

ContentGraph with_edge_weights(const ContentGraph& g, const Matrix& weights) {
    require_same_shape(g.adjacency, weights, "with_edge_weights");
    ContentGraph out = g;
    out.edge_weights = hadamard(weights, g.adjacency);
    return out;
}

}  // namespace bnews
