#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "brk/article.hpp"

namespace bnews {

/// One article per line:
///   {"id": str, "sentences": [str]} or {"id": str, "text": str},
///   optional "image_vectors": [[num]], required "label": 0 | 1.
/// Errors carry the 1-based line number.
std::vector<NewsArticle> load_dataset(const std::filesystem::path& path);
std::vector<NewsArticle> parse_dataset(const std::string& contents, const std::string& source);

std::string serialize_dataset(const std::vector<NewsArticle>& articles);
void write_dataset(const std::filesystem::path& path, const std::vector<NewsArticle>& articles);

struct DataSplits {
    std::vector<NewsArticle> train, val, test;
};

// Seeded shuffle followed by an 8:1:1 cut. A pure function of (articles, seed).
DataSplits split_dataset(const std::vector<NewsArticle>& articles, std::uint64_t seed);

}  // namespace bnews
