#pragma once

#include <string>
#include <vector>

namespace bnews {

// Label convention: 0 = real, 1 = fake.
struct NewsArticle {
    std::string id;
    std::vector<std::string> sentences;
    std::vector<std::vector<double>> image_vectors;
    int label = 0;

    std::size_t node_count() const { return sentences.size() + image_vectors.size(); }

    friend bool operator==(const NewsArticle&, const NewsArticle&) = default;
};

}  // namespace bnews
