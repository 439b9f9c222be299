#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brk/article.hpp"
#include "brk/matrix.hpp"

namespace bnews {

// Splits on '.', '!' or '?' followed by whitespace (or end of text). A text
// without terminal punctuation becomes a single sentence.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercased whitespace tokens.
std::vector<std::string> tokenize(std::string_view sentence);

struct ExternalEmbedding {
    Matrix node;  // M x d_ext
    Matrix seq;   // M x d_ext
};

using ExternalEmbeddingTable = std::map<std::string, ExternalEmbedding>;

// Line-delimited records {"id", "node_embeddings", "seq_embeddings"}.
ExternalEmbeddingTable load_external_embeddings(const std::filesystem::path& path);
void write_external_embeddings(const std::filesystem::path& path,
                               const ExternalEmbeddingTable& table);

enum class VectorizerMode { hash, external };
enum class Channel { node, seq };

/// Frozen sentence encoder for one feature channel.
///
/// In hash mode every token is mapped to a pseudo-random vector whose seed is
/// FNV-1a(channel_seed, token); a sentence is the L2-normalized mean of its
/// token vectors. In external mode rows are looked up by article id from a
/// loaded embedding table. The node and sequence channels must use different
/// seeds (or different channels of the same table).
class SentenceVectorizer {
public:
    static SentenceVectorizer hash(std::uint64_t channel_seed, std::size_t dim);
    static SentenceVectorizer external(std::shared_ptr<const ExternalEmbeddingTable> table,
                                       Channel channel);

    VectorizerMode mode() const noexcept { return mode_; }
    std::uint64_t channel_seed() const noexcept { return seed_; }
    std::size_t dim() const noexcept { return dim_; }
    Channel channel() const noexcept { return channel_; }

    // Hash mode only.
    std::vector<double> embed_sentence(std::string_view sentence) const;

    // M x d matrix for the article's sentences, in document order.
    Matrix embed_sentences(const NewsArticle& article) const;

    bool same_source(const SentenceVectorizer& other) const;

private:
    VectorizerMode mode_ = VectorizerMode::hash;
    std::uint64_t seed_ = 0;
    std::size_t dim_ = 0;
    Channel channel_ = Channel::node;
    std::shared_ptr<const ExternalEmbeddingTable> table_;
};

std::vector<double> hash_embed(const SentenceVectorizer& v, std::string_view sentence);

struct ArticleFeatures {
    Matrix x_node;  // N x d: sentences then images
    Matrix x_seq;   // N x d: sentences then the same projected images
    std::size_t sentence_count = 0;
    std::size_t image_count = 0;

    std::size_t node_count() const { return sentence_count + image_count; }
};

/// Sentence channels before the learnable image projection is applied. The
/// trainer caches this per article because the vectorizers are frozen.
struct EncodedArticle {
    std::string id;
    Matrix text_node;  // M x d
    Matrix text_seq;   // M x d
    Matrix images;     // P x d_img (0 x 0 when there are none)
    int label = 0;

    std::size_t node_count() const { return text_node.rows() + images.rows(); }
};

EncodedArticle encode_article(const NewsArticle& article, const SentenceVectorizer& node_vec,
                              const SentenceVectorizer& seq_vec);

// Appends images * image_proj to both channels.
ArticleFeatures project_features(const EncodedArticle& encoded,
                                 const std::optional<Matrix>& image_proj);

ArticleFeatures embed_article(const NewsArticle& article, const SentenceVectorizer& node_vec,
                              const SentenceVectorizer& seq_vec,
                              const std::optional<Matrix>& image_proj);

}  // namespace bnews
