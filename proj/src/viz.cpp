#include "brk/viz.hpp"

#include <stdexcept>

#include "brk/model.hpp"

namespace bnews {

namespace {

nlohmann::json matrix_json(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

}  // namespace

std::vector<double> node_weights(const std::vector<double>& in_degree,
                                 const std::vector<double>& out_degree) {
    if (in_degree.size() != out_degree.size()) throw std::invalid_argument("node_weights: length mismatch");
    const std::size_t n = in_degree.size();
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = in_degree[i] + out_degree[i];
        total += w[i];
    }
    for (double& x : w) x = total > 0.0 ? x / total : 1.0 / static_cast<double>(n);
    return w;
}

VizExport export_viz(const Checkpoint& ckpt, const NewsArticle& article,
                     const Vectorizers& vectorizers, Ablation ablation) {
    if (!uses_graph(ablation)) throw std::invalid_argument("export_viz needs the graph encoder (not no_gra)");
    const auto encoded = encode_article(article, vectorizers.node, vectorizers.seq);
    const auto tr = forward_encoded(encoded, denoise_params(ckpt.params), model_params(ckpt.params),
                                    ablation);
    VizExport v;
    for (const auto& s : article.sentences) v.nodes.push_back(s);
    for (std::size_t k = 0; k < article.image_vectors.size(); ++k)
        v.nodes.push_back("image " + std::to_string(k));

    v.edge_weights = tr.edge_weights;
    const std::size_t n = v.edge_weights.rows();
    v.in_degree.assign(n, 0.0);
    v.out_degree.assign(n, 0.0);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
            v.out_degree[s] += v.edge_weights(s, t);
            v.in_degree[t] += v.edge_weights(s, t);
        }
    v.node_weight = node_weights(v.in_degree, v.out_degree);
    v.sim_initial = pairwise_cosine(tr.features.x_node);
    v.sim_trained = pairwise_cosine(tr.gcn.out);
    return v;
}

nlohmann::json viz_to_json(const VizExport& v) {
    return nlohmann::json{
        {"nodes", v.nodes},
        {"edge_weights", matrix_json(v.edge_weights)},
        {"in_degree", v.in_degree},
        {"out_degree", v.out_degree},
        {"node_weight", v.node_weight},
        {"sim_initial", matrix_json(v.sim_initial)},
        {"sim_trained", matrix_json(v.sim_trained)},
    };
}

}  // namespace bnews
