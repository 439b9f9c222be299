#include "brk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "brk/rng.hpp"

namespace bnews {

namespace {

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u"};

// Deterministic pseudo-word; `tag` keeps vocabularies disjoint.
std::string make_word(std::size_t index, char tag) {
    std::string w(1, tag);
    std::size_t x = index;
    do {
        w += kOnsets[x % 14];
        x /= 14;
        w += kVowels[x % 5];
        x /= 5;
    } while (x > 0);
    return w;
}

std::vector<std::string> make_vocab(std::size_t n, char tag) {
    std::vector<std::string> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) v.push_back(make_word(i, tag));
    return v;
}

std::string join_sentence(const std::vector<std::string>& words) {
    std::string s;
    for (const auto& w : words) {
        if (!s.empty()) s += ' ';
        s += w;
    }
    if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
    s += '.';
    return s;
}

std::vector<std::string> build_pool(std::size_t size, std::size_t signal_words,
                                    const std::vector<std::string>& signal_vocab,
                                    const std::vector<std::string>& distractor_vocab,
                                    const std::vector<std::string>& shared, const SyntheticSpec& spec,
                                    Rng& rng) {
    std::vector<std::string> pool;
    std::set<std::string> seen;
    std::size_t attempts = 0;
    while (pool.size() < size) {
        if (++attempts > size * 100 + 1000)
            throw std::invalid_argument("synthetic: cannot build " + std::to_string(size) +
                                        " distinct sentences from the vocabulary");
        const auto len = static_cast<std::size_t>(rng.between(spec.min_words, spec.max_words));
        std::vector<std::string> words;
        for (std::size_t i = 0; i < len; ++i) {
            const bool from_signal = i < signal_words;
            const auto& vocab = from_signal ? signal_vocab : distractor_vocab;
            words.push_back(vocab[rng.below(vocab.size())]);
        }
        rng.shuffle(words);
        words.insert(words.begin(), shared.begin(), shared.end());
        auto s = join_sentence(words);
        if (seen.insert(s).second) pool.push_back(std::move(s));
    }
    return pool;
}

}  // namespace

void SyntheticSpec::validate() const {
    if (n_articles == 0) throw std::invalid_argument("synthetic: n_articles must be positive");
    if (min_sentences == 0 || min_sentences > max_sentences)
        throw std::invalid_argument("synthetic: invalid sentence range");
    if (min_words == 0 || min_words > max_words) throw std::invalid_argument("synthetic: invalid word range");
    if (!(signal_strength >= 0.0 && signal_strength <= 1.0))
        throw std::invalid_argument("synthetic: signal_strength must be in [0, 1]");
    if (!(class_balance > 0.0 && class_balance < 1.0))
        throw std::invalid_argument("synthetic: class_balance must be in (0, 1)");
    if (distractor_pool < max_sentences)
        throw std::invalid_argument("synthetic: distractor pool smaller than max_sentences");
    if (distractor_vocab == 0) throw std::invalid_argument("synthetic: empty distractor vocabulary");
    if (signal_strength > 0.0) {
        if (signal_pool == 0 || signal_vocab == 0 || signal_words == 0 || max_signals_per_article == 0)
            throw std::invalid_argument("synthetic: signal pool needed when signal_strength > 0");
        if (signal_words > min_words)
            throw std::invalid_argument("synthetic: signal_words exceeds min_words");
        if (max_signals_per_article > min_sentences || max_signals_per_article > signal_pool)
            throw std::invalid_argument("synthetic: too many signals per article for the pool/length");
    }
}

bool SyntheticCorpus::is_signal(const std::string& sentence) const {
    return std::find(signal_sentences.begin(), signal_sentences.end(), sentence) !=
           signal_sentences.end();
}

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto signal_vocab = make_vocab(spec.signal_vocab, 'q');
    const auto distractor_vocab = make_vocab(spec.distractor_vocab, 'x');
    std::vector<std::string> shared;
    for (std::size_t i = 0; i < spec.shared_words; ++i) shared.push_back(make_word(i, 'c'));

    SyntheticCorpus corpus;
    if (spec.signal_strength > 0.0)
        corpus.signal_sentences = build_pool(spec.signal_pool, spec.signal_words, signal_vocab,
                                             distractor_vocab, shared, spec, rng);
    corpus.distractor_sentences =
        build_pool(spec.distractor_pool, 0, signal_vocab, distractor_vocab, shared, spec, rng);

    const auto n_fake = static_cast<std::size_t>(
        std::llround(static_cast<double>(spec.n_articles) * spec.class_balance));
    std::vector<int> labels(spec.n_articles, 0);
    std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_fake), 1);
    rng.shuffle(labels);

    const std::size_t width = std::to_string(spec.n_articles).size();
    for (std::size_t i = 0; i < spec.n_articles; ++i) {
        NewsArticle a;
        std::string num = std::to_string(i);
        a.id = "syn-" + std::string(width - num.size(), '0') + num;
        a.label = labels[i];
        const auto len = static_cast<std::size_t>(rng.between(spec.min_sentences, spec.max_sentences));

        std::vector<std::size_t> picks(corpus.distractor_sentences.size());
        for (std::size_t k = 0; k < picks.size(); ++k) picks[k] = k;
        for (std::size_t k = 0; k < len; ++k) {
            const auto j = k + static_cast<std::size_t>(rng.below(picks.size() - k));
            std::swap(picks[k], picks[j]);
            a.sentences.push_back(corpus.distractor_sentences[picks[k]]);
        }

        const bool planted = a.label == 1 && spec.signal_strength > 0.0 &&
                             rng.uniform() < spec.signal_strength;
        if (planted) {
            const auto count = static_cast<std::size_t>(rng.between(1, spec.max_signals_per_article));
            std::vector<std::size_t> positions(len);
            for (std::size_t k = 0; k < len; ++k) positions[k] = k;
            rng.shuffle(positions);
            std::vector<std::size_t> sig(corpus.signal_sentences.size());
            for (std::size_t k = 0; k < sig.size(); ++k) sig[k] = k;
            rng.shuffle(sig);
            for (std::size_t k = 0; k < count; ++k)
                a.sentences[positions[k]] = corpus.signal_sentences[sig[k]];
        }
        corpus.articles.push_back(std::move(a));
    }
    return corpus;
}

}  // namespace bnews
