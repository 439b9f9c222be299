#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "brk/article.hpp"
#include "brk/checkpoint.hpp"

namespace bnews {

/// Case-study export for one article: the edge weights the graph encoder
/// used (rows are sources, columns targets), weighted in/out degrees, the
/// normalized node weight (in + out, summing to 1) and pairwise cosine
/// similarity of the initial node features and the trained graph encodings.
struct VizExport {
    std::vector<std::string> nodes;  // sentence text, then "image <k>"
    Matrix edge_weights;
    std::vector<double> in_degree;
    std::vector<double> out_degree;
    std::vector<double> node_weight;
    Matrix sim_initial;
    Matrix sim_trained;
};

VizExport export_viz(const Checkpoint& ckpt, const NewsArticle& article,
                     const Vectorizers& vectorizers, Ablation ablation);

// in + out per node, normalized to sum 1; uniform when every weight is 0.
std::vector<double> node_weights(const std::vector<double>& in_degree,
                                 const std::vector<double>& out_degree);

nlohmann::json viz_to_json(const VizExport& v);

}  // namespace bnews
