#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "brk/embedding.hpp"
#include "brk/graph.hpp"
#include "test_util.hpp"

using namespace bnews;

namespace {

// Written from the format description only: FNV-1a over the seed's little
// endian bytes, then over the token; mt19937_64 draws mapped to [-1, 1).
std::vector<double> reference_hash_embed(std::uint64_t seed, std::size_t d, const std::vector<std::string>& tokens) {
    std::vector<double> acc(d, 0.0);
    if (tokens.empty()) return acc;
    std::uint64_t base = 14695981039346656037ULL;
    for (int i = 0; i < 8; ++i) {
        base ^= (seed >> (8 * i)) & 0xff;
        base *= 1099511628211ULL;
    }
    for (const auto& t : tokens) {
        std::uint64_t h = base;
        for (unsigned char c : t) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        std::mt19937_64 eng(h);
        for (auto& a : acc) a += -1.0 + 2.0 * (static_cast<double>(eng() >> 11) / 9007199254740992.0);
    }
    double n2 = 0.0;
    for (auto& a : acc) {
        a /= static_cast<double>(tokens.size());
    }
    for (double a : acc) n2 += a * a;
    const double n = std::sqrt(n2);
    for (auto& a : acc) a /= n;
    return acc;
}

NewsArticle article(std::vector<std::string> sentences, std::vector<std::vector<double>> images = {}) {
    NewsArticle a;
    a.id = "a1";
    a.sentences = std::move(sentences);
    a.image_vectors = std::move(images);
    a.label = 1;
    return a;
}

}  // namespace

TEST(SplitSentences, Examples) {
    EXPECT_EQ(split_sentences("A. B? C!"), (std::vector<std::string>{"A.", "B?", "C!"}));
    EXPECT_EQ(split_sentences("no punctuation here"), (std::vector<std::string>{"no punctuation here"}));
    EXPECT_TRUE(split_sentences("").empty());
    EXPECT_TRUE(split_sentences("   ").empty());
    EXPECT_EQ(split_sentences("Pi is 3.14 roughly. Yes"), (std::vector<std::string>{"Pi is 3.14 roughly.", "Yes"}));
    EXPECT_EQ(split_sentences("  Spaced out.   Next one.  "),
              (std::vector<std::string>{"Spaced out.", "Next one."}));
}

TEST(Tokenize, LowercasesOnWhitespace) {
    EXPECT_EQ(tokenize("  The CAT\tsat\n"), (std::vector<std::string>{"the", "cat", "sat"}));
    EXPECT_TRUE(tokenize("").empty());
}

TEST(HashEmbed, EmptySentenceIsZero) {
    const auto v = SentenceVectorizer::hash(1, 6);
    EXPECT_EQ(hash_embed(v, ""), std::vector<double>(6, 0.0));
}

TEST(HashEmbed, OrderInvariantAndUnitNorm) {
    const auto v = SentenceVectorizer::hash(1, 16);
    const auto a = hash_embed(v, "alpha beta");
    EXPECT_EQ(a, hash_embed(v, "beta alpha"));
    EXPECT_EQ(a, hash_embed(v, "ALPHA   Beta"));
    EXPECT_NEAR(l2_norm(a), 1.0, 1e-12);
}

TEST(HashEmbed, MatchesIndependentReimplementationBitwise) {
    for (std::uint64_t seed : {0ULL, 7ULL, 0x6e6f64655f636831ULL}) {
        const auto v = SentenceVectorizer::hash(seed, 12);
        for (const char* s : {"one", "the quick brown fox", "Repeated repeated word"}) {
            EXPECT_EQ(hash_embed(v, s), reference_hash_embed(seed, 12, tokenize(s))) << s;
        }
    }
}

TEST(HashEmbed, ChannelsDiffer) {
    const auto node = SentenceVectorizer::hash(11, 8);
    const auto seq = SentenceVectorizer::hash(12, 8);
    Rng rng(4);
    int differ = 0;
    for (int i = 0; i < 100; ++i) {
        const std::string s = "tok" + std::to_string(rng.next() % 100000) + " w" + std::to_string(i);
        if (hash_embed(node, s) != hash_embed(seq, s)) ++differ;
    }
    EXPECT_GE(differ, 99);
}

TEST(EmbedArticle, ShapesAndTextOnly) {
    const auto node = SentenceVectorizer::hash(1, 5);
    const auto seq = SentenceVectorizer::hash(2, 5);
    const auto f = embed_article(article({"a b.", "c d.", "e f."}), node, seq, std::nullopt);
    EXPECT_EQ(f.x_node.rows(), 3u);
    EXPECT_EQ(f.x_node.cols(), 5u);
    EXPECT_EQ(f.x_seq.rows(), 3u);
    EXPECT_EQ(f.node_count(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(l2_norm(f.x_node.row(i)), 1.0, 1e-12);
        EXPECT_NEAR(l2_norm(f.x_seq.row(i)), 1.0, 1e-12);
    }
}

TEST(EmbedArticle, ImageRowsUseTheProjectionInBothChannels) {
    const auto node = SentenceVectorizer::hash(1, 4);
    const auto seq = SentenceVectorizer::hash(2, 4);
    Rng rng(8);
    const auto proj = testutil::random_matrix(6, 4, rng);
    std::vector<double> img(6);
    for (auto& x : img) x = rng.uniform(-1, 1);
    const auto f = embed_article(article({"first one.", "second one."}, {img}), node, seq, proj);
    ASSERT_EQ(f.x_node.rows(), 3u);
    for (std::size_t j = 0; j < 4; ++j) {
        double expect = 0.0;
        for (std::size_t k = 0; k < 6; ++k) expect += img[k] * proj(k, j);
        EXPECT_NEAR(f.x_node(2, j), expect, 1e-12);
        EXPECT_EQ(f.x_node(2, j), f.x_seq(2, j));
    }
    EXPECT_EQ(f.sentence_count, 2u);
    EXPECT_EQ(f.image_count, 1u);
    EXPECT_THROW(embed_article(article({"x."}, {img}), node, seq, std::nullopt), std::invalid_argument);
}

TEST(EmbedArticle, Errors) {
    const auto node = SentenceVectorizer::hash(1, 4);
    EXPECT_THROW(embed_article(article({}), node, SentenceVectorizer::hash(2, 4), std::nullopt),
                 std::invalid_argument);
    EXPECT_THROW(embed_article(article({"x"}), node, SentenceVectorizer::hash(1, 4), std::nullopt),
                 std::invalid_argument);
    EXPECT_THROW(embed_article(article({"x"}), node, SentenceVectorizer::hash(2, 5), std::nullopt),
                 std::invalid_argument);
}

TEST(EmbedArticle, PureFunction) {
    const auto node = SentenceVectorizer::hash(1, 8);
    const auto seq = SentenceVectorizer::hash(2, 8);
    const auto a = article({"Some text here.", "More text."});
    const auto f1 = embed_article(a, node, seq, std::nullopt);
    const auto f2 = embed_article(a, node, seq, std::nullopt);
    EXPECT_EQ(f1.x_node, f2.x_node);
    EXPECT_EQ(f1.x_seq, f2.x_seq);
}

TEST(EmbedArticle, TenSentencesGiveNinetyEdges) {
    std::vector<std::string> s;
    for (int i = 0; i < 10; ++i) s.push_back("sentence number " + std::to_string(i) + ".");
    const auto f = embed_article(article(s), SentenceVectorizer::hash(1, 4), SentenceVectorizer::hash(2, 4),
                                 std::nullopt);
    EXPECT_EQ(build_graph(f).directed_edge_count(), 90u);
}

TEST(ExternalEmbeddings, RoundTripAndLookup) {
    testutil::TempDir dir("emb");
    Rng rng(1);
    ExternalEmbeddingTable table;
    table["a1"] = {testutil::random_matrix(2, 4, rng), testutil::random_matrix(2, 4, rng)};
    table["b2"] = {testutil::random_matrix(3, 4, rng), testutil::random_matrix(3, 4, rng)};
    write_external_embeddings(dir / "e.jsonl", table);
    const auto loaded = load_external_embeddings(dir / "e.jsonl");
    ASSERT_EQ(loaded.size(), 2u);
    EXPECT_EQ(loaded.at("a1").node, table.at("a1").node);
    EXPECT_EQ(loaded.at("b2").seq, table.at("b2").seq);

    auto shared = std::make_shared<const ExternalEmbeddingTable>(loaded);
    const auto node = SentenceVectorizer::external(shared, Channel::node);
    const auto seq = SentenceVectorizer::external(shared, Channel::seq);
    const auto f = embed_article(article({"x.", "y."}), node, seq, std::nullopt);
    EXPECT_EQ(f.x_node, table.at("a1").node);
    EXPECT_EQ(f.x_seq, table.at("a1").seq);
    auto wrong = article({"only one."});
    EXPECT_THROW(embed_article(wrong, node, seq, std::nullopt), std::runtime_error);
}

TEST(ExternalEmbeddings, OneArticleEcho) {
    testutil::TempDir dir("emb1");
    {
        std::ofstream out(dir / "e.jsonl");
        out << R"({"id":"n1","node_embeddings":[[1,2,3,4],[5,6,7,8]],"seq_embeddings":[[0,0,0,1],[1,0,0,0]]})"
            << "\n";
    }
    const auto t = load_external_embeddings(dir / "e.jsonl");
    ASSERT_EQ(t.size(), 1u);
    EXPECT_EQ(t.at("n1").node, Matrix::from_rows({{1, 2, 3, 4}, {5, 6, 7, 8}}));
    EXPECT_EQ(t.at("n1").seq.rows(), 2u);
    EXPECT_EQ(t.at("n1").seq.cols(), 4u);
}

TEST(ExternalEmbeddings, Errors) {
    testutil::TempDir dir("emb2");
    auto load_text = [&](const std::string& text) {
        std::ofstream(dir / "e.jsonl") << text;
        return load_external_embeddings(dir / "e.jsonl");
    };
    const std::string rec = R"({"id":"d","node_embeddings":[[1,2]],"seq_embeddings":[[3,4]]})";
    EXPECT_THROW(load_text(rec + "\n" + rec + "\n"), std::runtime_error);
    EXPECT_THROW(load_text(R"({"id":"m","node_embeddings":[[1,2]]})"), std::runtime_error);
    try {
        load_text(R"({"id":"ragged","node_embeddings":[[1,2],[3]],"seq_embeddings":[[1,2],[3,4]]})");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("ragged"), std::string::npos);
    }
}
