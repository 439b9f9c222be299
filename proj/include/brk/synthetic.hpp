#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "brk/article.hpp"

namespace bnews {

/// Planted-signal corpus parameters. Fake articles carry one or more
/// sentences from the signal pool (with probability `signal_strength`);
/// every other sentence comes from the distractor pool. The two pools are
/// built from disjoint "signal" and "distractor" vocabularies.
struct SyntheticSpec {
    std::size_t n_articles = 500;
    std::size_t min_sentences = 8;
    std::size_t max_sentences = 16;
    std::size_t signal_pool = 40;
    std::size_t distractor_pool = 400;
    std::size_t signal_vocab = 4;
    std::size_t distractor_vocab = 800;
    std::size_t min_words = 6;
    std::size_t max_words = 10;
    // Tokens of a signal sentence drawn from the signal vocabulary; the rest
    // of the sentence uses distractor words.
    std::size_t signal_words = 4;
    std::size_t max_signals_per_article = 2;
    // Length of a phrase shared by every sentence of the corpus. Large values
    // produce near-duplicate sentence embeddings.
    std::size_t shared_words = 2;
    double signal_strength = 1.0;
    double class_balance = 0.5;
    std::uint64_t seed = 7;

    void validate() const;
};

struct SyntheticCorpus {
    std::vector<NewsArticle> articles;
    std::vector<std::string> signal_sentences;
    std::vector<std::string> distractor_sentences;

    bool is_signal(const std::string& sentence) const;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace bnews
