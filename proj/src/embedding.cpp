#include "brk/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "brk/io.hpp"
#include "brk/rng.hpp"

namespace bnews {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

Matrix rows_to_matrix(const nlohmann::json& rows, const std::string& id, const char* field) {
    if (!rows.is_array()) throw std::runtime_error("article '" + id + "': " + field + " must be a list");
    std::vector<std::vector<double>> out;
    for (const auto& r : rows) {
        if (!r.is_array()) throw std::runtime_error("article '" + id + "': " + field + " rows must be lists");
        auto row = r.get<std::vector<double>>();
        if (!out.empty() && row.size() != out.front().size())
            throw std::runtime_error("article '" + id + "': dimension mismatch across rows in " + field);
        out.push_back(std::move(row));
    }
    return Matrix::from_rows(out);
}

nlohmann::json matrix_rows(const Matrix& m) {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i)
        rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
    return rows;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c != '.' && c != '!' && c != '?') continue;
        if (i + 1 < text.size() && !is_space(text[i + 1])) continue;
        auto piece = trim(text.substr(start, i + 1 - start));
        if (!piece.empty()) out.push_back(std::move(piece));
        start = i + 1;
    }
    auto tail = trim(text.substr(std::min(start, text.size())));
    if (!tail.empty()) out.push_back(std::move(tail));
    return out;
}

std::vector<std::string> tokenize(std::string_view sentence) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : sentence) {
        if (is_space(c)) {
            if (!cur.empty()) tokens.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

ExternalEmbeddingTable load_external_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file " + path.string());
    ExternalEmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!rec.contains("id") || !rec["id"].is_string())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": missing id");
        const auto id = rec["id"].get<std::string>();
        if (!rec.contains("node_embeddings") || !rec.contains("seq_embeddings"))
            throw std::runtime_error("article '" + id + "': missing embedding channel");
        ExternalEmbedding emb{rows_to_matrix(rec["node_embeddings"], id, "node_embeddings"),
                              rows_to_matrix(rec["seq_embeddings"], id, "seq_embeddings")};
        if (emb.node.rows() != emb.seq.rows())
            throw std::runtime_error("article '" + id + "': channels have different row counts");
        if (emb.node.cols() != emb.seq.cols())
            throw std::runtime_error("article '" + id + "': dimension mismatch between channels");
        if (!table.emplace(id, std::move(emb)).second)
            throw std::runtime_error("duplicate article id '" + id + "' in " + path.string());
    }
    return table;
}

void write_external_embeddings(const std::filesystem::path& path,
                               const ExternalEmbeddingTable& table) {
    std::string out;
    for (const auto& [id, emb] : table) {
        nlohmann::json rec;
        rec["id"] = id;
        rec["node_embeddings"] = matrix_rows(emb.node);
        rec["seq_embeddings"] = matrix_rows(emb.seq);
        out += rec.dump();
        out += '\n';
    }
    write_file_atomic(path, out);
}

SentenceVectorizer SentenceVectorizer::hash(std::uint64_t channel_seed, std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("vectorizer dimension must be positive");
    SentenceVectorizer v;
    v.mode_ = VectorizerMode::hash;
    v.seed_ = channel_seed;
    v.dim_ = dim;
    return v;
}

SentenceVectorizer SentenceVectorizer::external(
    std::shared_ptr<const ExternalEmbeddingTable> table, Channel channel) {
    if (!table || table->empty()) throw std::invalid_argument("external vectorizer needs a non-empty table");
    SentenceVectorizer v;
    v.mode_ = VectorizerMode::external;
    v.channel_ = channel;
    v.dim_ = 0;
    for (const auto& [id, emb] : *table) {
        const std::size_t d = emb.node.cols();
        if (d == 0) continue;
        if (v.dim_ != 0 && d != v.dim_)
            throw std::invalid_argument("article '" + id + "': embedding dimension differs from " +
                                        std::to_string(v.dim_));
        v.dim_ = d;
    }
    v.table_ = std::move(table);
    return v;
}

std::vector<double> SentenceVectorizer::embed_sentence(std::string_view sentence) const {
    if (mode_ != VectorizerMode::hash)
        throw std::logic_error("embed_sentence requires a hash-mode vectorizer");
    std::vector<double> acc(dim_, 0.0);
    const auto tokens = tokenize(sentence);
    if (tokens.empty()) return acc;

    unsigned char seed_bytes[8];
    for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<unsigned char>(seed_ >> (8 * i));
    const std::uint64_t base = fnv1a(seed_bytes, sizeof seed_bytes);

    for (const auto& tok : tokens) {
        Rng rng(fnv1a(tok.data(), tok.size(), base));
        for (double& a : acc) a += rng.uniform(-1.0, 1.0);
    }
    const auto n = static_cast<double>(tokens.size());
    for (double& a : acc) a /= n;
    const double norm = l2_norm(acc);
    if (norm == 0.0) return acc;
    for (double& a : acc) a /= norm;
    return acc;
}

Matrix SentenceVectorizer::embed_sentences(const NewsArticle& article) const {
    if (mode_ == VectorizerMode::external) {
        auto it = table_->find(article.id);
        if (it == table_->end())
            throw std::runtime_error("no external embeddings for article '" + article.id + "'");
        const Matrix& m = channel_ == Channel::node ? it->second.node : it->second.seq;
        if (m.rows() != article.sentences.size())
            throw std::runtime_error("article '" + article.id + "': " + std::to_string(m.rows()) +
                                     " embedding rows for " +
                                     std::to_string(article.sentences.size()) + " sentences");
        return m;
    }
    Matrix out(article.sentences.size(), dim_);
    for (std::size_t i = 0; i < article.sentences.size(); ++i) {
        const auto v = embed_sentence(article.sentences[i]);
        std::copy(v.begin(), v.end(), out.row(i).begin());
    }
    return out;
}

bool SentenceVectorizer::same_source(const SentenceVectorizer& other) const {
    if (mode_ != other.mode_) return false;
    if (mode_ == VectorizerMode::hash) return seed_ == other.seed_;
    return table_ == other.table_ && channel_ == other.channel_;
}

std::vector<double> hash_embed(const SentenceVectorizer& v, std::string_view sentence) {
    return v.embed_sentence(sentence);
}

EncodedArticle encode_article(const NewsArticle& article, const SentenceVectorizer& node_vec,
                              const SentenceVectorizer& seq_vec) {
    if (article.sentences.empty() && article.image_vectors.empty())
        throw std::invalid_argument("empty article '" + article.id + "'");
    if (node_vec.dim() != seq_vec.dim())
        throw std::invalid_argument("node and sequence vectorizers differ in dimension");
    if (node_vec.same_source(seq_vec))
        throw std::invalid_argument("node and sequence channels must use distinct sources");
    EncodedArticle enc;
    enc.id = article.id;
    enc.label = article.label;
    if (article.sentences.empty()) {
        enc.text_node = Matrix(0, node_vec.dim());
        enc.text_seq = Matrix(0, seq_vec.dim());
    } else {
        enc.text_node = node_vec.embed_sentences(article);
        enc.text_seq = seq_vec.embed_sentences(article);
    }
    if (!article.image_vectors.empty()) enc.images = Matrix::from_rows(article.image_vectors);
    return enc;
}

ArticleFeatures project_features(const EncodedArticle& encoded,
                                 const std::optional<Matrix>& image_proj) {
    ArticleFeatures f;
    f.sentence_count = encoded.text_node.rows();
    f.image_count = encoded.images.rows();
    if (f.node_count() == 0) throw std::invalid_argument("empty article '" + encoded.id + "'");
    if (f.image_count == 0) {
        f.x_node = encoded.text_node;
        f.x_seq = encoded.text_seq;
        return f;
    }
    if (!image_proj)
        throw std::invalid_argument("article '" + encoded.id + "' has images but no image projection");
    if (image_proj->rows() != encoded.images.cols() || image_proj->cols() != encoded.text_node.cols())
        throw std::invalid_argument("article '" + encoded.id + "': image projection is " +
                                    shape_string(*image_proj) + ", images are " +
                                    shape_string(encoded.images));
    const Matrix projected = matmul(encoded.images, *image_proj);
    f.x_node = vconcat(encoded.text_node, projected);
    f.x_seq = vconcat(encoded.text_seq, projected);
    return f;
}

ArticleFeatures embed_article(const NewsArticle& article, const SentenceVectorizer& node_vec,
                              const SentenceVectorizer& seq_vec,
                              const std::optional<Matrix>& image_proj) {
    return project_features(encode_article(article, node_vec, seq_vec), image_proj);
}

}  // namespace bnews
