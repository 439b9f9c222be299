#include "brk/dataset.hpp"

#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "brk/embedding.hpp"
#include "brk/io.hpp"
#include "brk/rng.hpp"

namespace bnews {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
    throw std::runtime_error(source + ":" + std::to_string(line) + ": " + msg);
}

NewsArticle parse_record(const json& rec, const std::string& source, std::size_t line) {
    if (!rec.is_object()) fail(source, line, "record must be an object");
    NewsArticle a;
    if (!rec.contains("id") || !rec["id"].is_string()) fail(source, line, "missing string field 'id'");
    a.id = rec["id"].get<std::string>();

    if (rec.contains("sentences")) {
        const auto& s = rec["sentences"];
        if (!s.is_array()) fail(source, line, "'sentences' must be a list of strings");
        for (const auto& v : s) {
            if (!v.is_string()) fail(source, line, "'sentences' must be a list of strings");
            a.sentences.push_back(v.get<std::string>());
        }
    } else if (rec.contains("text")) {
        if (!rec["text"].is_string()) fail(source, line, "'text' must be a string");
        a.sentences = split_sentences(rec["text"].get<std::string>());
    } else {
        fail(source, line, "missing field 'sentences' or 'text'");
    }

    if (rec.contains("image_vectors")) {
        const auto& iv = rec["image_vectors"];
        if (!iv.is_array()) fail(source, line, "'image_vectors' must be a list of lists");
        for (const auto& row : iv) {
            if (!row.is_array()) fail(source, line, "'image_vectors' must be a list of lists");
            std::vector<double> v;
            for (const auto& x : row) {
                if (!x.is_number()) fail(source, line, "image vector entries must be numbers");
                v.push_back(x.get<double>());
            }
            if (!a.image_vectors.empty() && v.size() != a.image_vectors.front().size())
                fail(source, line, "image vectors have inconsistent widths");
            a.image_vectors.push_back(std::move(v));
        }
    }

    if (!rec.contains("label")) fail(source, line, "missing field 'label'");
    const auto& lab = rec["label"];
    if (!lab.is_number_integer() || (lab.get<int>() != 0 && lab.get<int>() != 1))
        fail(source, line, "label must be 0 or 1");
    a.label = lab.get<int>();

    if (a.node_count() == 0) fail(source, line, "article '" + a.id + "' has no sentences or images");
    return a;
}

}  // namespace

std::vector<NewsArticle> parse_dataset(const std::string& contents, const std::string& source) {
    std::vector<NewsArticle> out;
    std::set<std::string> seen;
    std::istringstream in(contents);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            fail(source, lineno, std::string("invalid JSON: ") + e.what());
        }
        auto a = parse_record(rec, source, lineno);
        if (!seen.insert(a.id).second) fail(source, lineno, "duplicate id '" + a.id + "'");
        out.push_back(std::move(a));
    }
    if (out.empty()) throw std::runtime_error(source + ": dataset is empty");
    return out;
}

std::vector<NewsArticle> load_dataset(const std::filesystem::path& path) {
    return parse_dataset(read_file(path), path.string());
}

std::string serialize_dataset(const std::vector<NewsArticle>& articles) {
    std::string out;
    for (const auto& a : articles) {
        json rec;
        rec["id"] = a.id;
        rec["sentences"] = a.sentences;
        if (!a.image_vectors.empty()) rec["image_vectors"] = a.image_vectors;
        rec["label"] = a.label;
        out += rec.dump();
        out += '\n';
    }
    return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<NewsArticle>& articles) {
    write_file_atomic(path, serialize_dataset(articles));
}

DataSplits split_dataset(const std::vector<NewsArticle>& articles, std::uint64_t seed) {
    std::vector<std::size_t> idx(articles.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    const std::size_t n = articles.size();
    const std::size_t n_train = n * 8 / 10;
    const std::size_t n_val = (n - n_train) / 2;
    DataSplits s;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = articles[idx[i]];
        if (i < n_train) s.train.push_back(a);
        else if (i < n_train + n_val) s.val.push_back(a);
        else s.test.push_back(a);
    }
    return s;
}

}  // namespace bnews
