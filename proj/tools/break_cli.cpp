// Command-line driver: train, eval, infer, gen-synthetic, export-viz, gradcheck.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "brk/checkpoint.hpp"
#include "brk/dataset.hpp"
#include "brk/gradcheck_suite.hpp"
#include "brk/io.hpp"
#include "brk/log.hpp"
#include "brk/synthetic.hpp"
#include "brk/trainer.hpp"
#include "brk/viz.hpp"

using namespace bnews;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Options shared by train and eval that override config values.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> split_seed;
    std::optional<double> beta;
    std::optional<std::string> ablate;
    std::optional<std::string> dims;
    std::optional<std::size_t> epochs;
    std::optional<std::size_t> patience;
};

std::pair<std::size_t, std::size_t> parse_dims(const std::string& s) {
    const auto comma = s.find(',');
    std::size_t d = 0, h = 0;
    try {
        if (comma == std::string::npos) throw std::invalid_argument("");
        std::size_t used = 0;
        d = std::stoul(s.substr(0, comma), &used);
        if (used != comma) throw std::invalid_argument("");
        const auto rest = s.substr(comma + 1);
        h = std::stoul(rest, &used);
        if (used != rest.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("--dims expects d,h (got '" + s + "')");
    }
    if (d == 0 || h == 0) throw std::invalid_argument("--dims values must be positive");
    return {d, h};
}

TrainConfig apply(TrainConfig cfg, const Overrides& o) {
    if (o.seed) cfg.seed = *o.seed;
    if (o.split_seed) cfg.split_seed = *o.split_seed;
    if (o.beta) cfg.beta = *o.beta;
    if (o.ablate) cfg.ablation = parse_ablation(*o.ablate);
    if (o.dims) std::tie(cfg.d, cfg.h) = parse_dims(*o.dims);
    if (o.epochs) cfg.max_epochs = *o.epochs;
    if (o.patience) cfg.patience = *o.patience;
    cfg.validate();
    return cfg;
}

Vectorizers make_vectorizers(const TrainConfig& cfg, const std::string& embeddings) {
    if (embeddings.empty()) return cfg.hash_vectorizers();
    auto table = std::make_shared<const ExternalEmbeddingTable>(load_external_embeddings(embeddings));
    for (const auto& [id, e] : *table)
        if (e.node.cols() != cfg.d || e.seq.cols() != cfg.d)
            throw std::invalid_argument("embeddings for '" + id + "' have width " +
                                        std::to_string(e.node.cols()) + ", config d is " +
                                        std::to_string(cfg.d));
    return {SentenceVectorizer::external(table, Channel::node), SentenceVectorizer::external(table, Channel::seq)};
}

const std::vector<NewsArticle>& pick_split(const DataSplits& s, const std::vector<NewsArticle>& all,
                                           const std::string& name) {
    if (name == "train") return s.train;
    if (name == "val") return s.val;
    if (name == "test") return s.test;
    if (name == "all") return all;
    throw std::invalid_argument("--split must be train, val, test or all (got '" + name + "')");
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") std::cout << text;
    else write_file_atomic(out, text);
}

int cmd_train(const std::string& data, const std::string& config, const std::string& out_dir,
              const std::string& embeddings, const Overrides& o) {
    TrainConfig cfg = config.empty() ? TrainConfig{} : load_config_file(config);
    cfg = apply(cfg, o);
    const auto articles = load_dataset(data);
    const auto splits = split_dataset(articles, cfg.split_seed);
    if (splits.val.empty()) throw std::invalid_argument("dataset too small for a validation split");
    const auto vec = make_vectorizers(cfg, embeddings);
    const auto train_set = encode_all(splits.train, vec);
    const auto val_set = encode_all(splits.val, vec);
    const auto test_set = encode_all(splits.test, vec);

    spdlog::info("train {} val {} test {} articles, ablation {}", train_set.size(), val_set.size(),
                 test_set.size(), to_string(cfg.ablation));
    auto result = train(train_set, val_set, cfg);

    Checkpoint ck;
    ck.config = cfg;
    ck.params = result.params;
    ck.image_dim = result.image_dim;
    ck.best_epoch = result.best_epoch;
    ck.best_val_f1 = result.best_val_f1;
    ck.train_metrics = evaluate(ck.params, train_set, cfg.ablation);

    json history = json::array();
    for (const auto& r : result.history)
        history.push_back({{"epoch", r.epoch}, {"train_loss", r.train_loss}, {"val", metrics_to_json(r.val)}});
    json metrics{{"best_epoch", result.best_epoch},
                 {"train", metrics_to_json(ck.train_metrics)},
                 {"val", metrics_to_json(evaluate(ck.params, val_set, cfg.ablation))},
                 {"history", history}};
    if (!test_set.empty()) metrics["test"] = metrics_to_json(evaluate(ck.params, test_set, cfg.ablation));

    fs::create_directories(out_dir);
    save_checkpoint(fs::path(out_dir) / "checkpoint.json", ck);
    write_file_atomic(fs::path(out_dir) / "metrics.json", metrics.dump(2) + "\n");
    std::cout << metrics["test"].dump() << "\n";
    return 0;
}

int cmd_eval(const std::string& ckpt_path, const std::string& data, const std::string& split,
             const std::string& embeddings, const std::string& out, const std::optional<std::string>& ablate) {
    const auto ck = load_checkpoint(ckpt_path);
    const Ablation ablation = ablate ? parse_ablation(*ablate) : ck.config.ablation;
    if (uses_graph(ablation) != uses_graph(ck.config.ablation) ||
        uses_sequence(ablation) != uses_sequence(ck.config.ablation))
        throw std::invalid_argument("--ablate " + std::string(to_string(ablation)) +
                                    " needs encoders the checkpoint was not trained with");
    const auto articles = load_dataset(data);
    const auto splits = split_dataset(articles, ck.config.split_seed);
    const auto& chosen = pick_split(splits, articles, split);
    if (chosen.empty()) throw std::invalid_argument("split '" + split + "' is empty");
    const auto encoded = encode_all(chosen, make_vectorizers(ck.config, embeddings));
    const auto m = evaluate(ck.params, encoded, ablation);
    json doc = metrics_to_json(m);
    doc["split"] = split;
    doc["ablation"] = to_string(ablation);
    doc["articles"] = encoded.size();
    emit(out, doc.dump() + "\n");
    return 0;
}

int cmd_infer(const std::string& ckpt_path, const std::string& data, const std::string& id,
              const std::string& embeddings, const std::string& out) {
    const auto ck = load_checkpoint(ckpt_path);
    auto articles = load_dataset(data);
    if (!id.empty()) {
        std::erase_if(articles, [&](const NewsArticle& a) { return a.id != id; });
        if (articles.empty()) throw std::invalid_argument("no article with id '" + id + "'");
    }
    const auto encoded = encode_all(articles, make_vectorizers(ck.config, embeddings));
    const auto probs = predict(ck.params, encoded, ck.config.ablation);
    std::ostringstream os;
    for (std::size_t i = 0; i < encoded.size(); ++i)
        os << json{{"id", encoded[i].id}, {"prob", probs[i]}, {"label", probs[i] >= 0.5 ? 1 : 0}}.dump() << "\n";
    emit(out, os.str());
    return 0;
}

int cmd_export_viz(const std::string& ckpt_path, const std::string& data, const std::string& id,
                   const std::string& embeddings, const std::string& out, const std::optional<std::string>& ablate) {
    const auto ck = load_checkpoint(ckpt_path);
    const auto articles = load_dataset(data);
    const auto it = std::find_if(articles.begin(), articles.end(), [&](const NewsArticle& a) { return a.id == id; });
    if (it == articles.end()) throw std::invalid_argument("no article with id '" + id + "'");
    const Ablation ablation = ablate ? parse_ablation(*ablate) : ck.config.ablation;
    const auto v = export_viz(ck, *it, make_vectorizers(ck.config, embeddings), ablation);
    auto doc = viz_to_json(v);
    doc["id"] = id;
    emit(out, doc.dump(2) + "\n");
    return 0;
}

int cmd_gradcheck(std::uint64_t seed) {
    bool ok = true;
    for (const auto& c : run_gradcheck_suite(seed)) {
        std::printf("%-28s %s  max_rel_err %.3e\n", c.name.c_str(), c.report.passed ? "ok  " : "FAIL",
                    c.report.max_rel_error);
        if (!c.report.passed) {
            std::printf("  %s\n", c.report.failure.c_str());
            ok = false;
        }
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"Sentence-graph fake news detector with bi-level structure and feature denoising"};
    app.require_subcommand(1);

    std::string data, config, out, ckpt, split = "test", id, embeddings, signals;
    Overrides o;
    std::optional<std::string> eval_ablate;
    std::uint64_t gc_seed = 2024;
    SyntheticSpec spec;

    auto add_overrides = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "model initialization / batch order seed");
        sub->add_option("--split-seed", o.split_seed, "dataset shuffle seed for the 8:1:1 split");
        sub->add_option("--beta", o.beta, "weight of the KL alignment term");
        sub->add_option("--ablate", o.ablate, "full | no_inf | no_seq | no_gra");
        sub->add_option("--dims", o.dims, "embedding and hidden width, d,h");
        sub->add_option("--epochs", o.epochs, "maximum epochs");
        sub->add_option("--patience", o.patience, "early-stopping patience");
    };

    auto* train_cmd = app.add_subcommand("train", "train a model and write checkpoint.json + metrics.json");
    train_cmd->add_option("--data", data, "dataset (JSON lines)")->required();
    train_cmd->add_option("--config", config, "flat JSON config file");
    train_cmd->add_option("--out", out, "output directory")->required();
    train_cmd->add_option("--embeddings", embeddings, "precomputed sentence embeddings (JSON lines)");
    add_overrides(train_cmd);

    auto* eval_cmd = app.add_subcommand("eval", "weighted metrics of a checkpoint on a split");
    eval_cmd->add_option("--checkpoint", ckpt)->required();
    eval_cmd->add_option("--data", data)->required();
    eval_cmd->add_option("--split", split, "train | val | test | all");
    eval_cmd->add_option("--ablate", eval_ablate, "override the forward pass (e.g. no_inf)");
    eval_cmd->add_option("--embeddings", embeddings);
    eval_cmd->add_option("--out", out, "write metrics JSON here instead of stdout");

    auto* infer_cmd = app.add_subcommand("infer", "per-article fake probability (JSON lines)");
    infer_cmd->add_option("--checkpoint", ckpt)->required();
    infer_cmd->add_option("--data", data)->required();
    infer_cmd->add_option("--id", id, "only this article");
    infer_cmd->add_option("--embeddings", embeddings);
    infer_cmd->add_option("--out", out);

    auto* gen_cmd = app.add_subcommand("gen-synthetic", "write a planted-signal corpus");
    gen_cmd->add_option("--out", out, "dataset file")->required();
    gen_cmd->add_option("--signals", signals, "also write the signal sentences (JSON array)");
    gen_cmd->add_option("--seed", spec.seed);
    gen_cmd->add_option("--n", spec.n_articles, "number of articles");
    gen_cmd->add_option("--min-sentences", spec.min_sentences);
    gen_cmd->add_option("--max-sentences", spec.max_sentences);
    gen_cmd->add_option("--signal-pool", spec.signal_pool);
    gen_cmd->add_option("--distractor-pool", spec.distractor_pool);
    gen_cmd->add_option("--signal-vocab", spec.signal_vocab);
    gen_cmd->add_option("--distractor-vocab", spec.distractor_vocab);
    gen_cmd->add_option("--signal-words", spec.signal_words);
    gen_cmd->add_option("--shared-words", spec.shared_words, "phrase shared by every sentence");
    gen_cmd->add_option("--max-signals", spec.max_signals_per_article);
    gen_cmd->add_option("--signal-strength", spec.signal_strength);
    gen_cmd->add_option("--balance", spec.class_balance, "fraction of fake articles");

    auto* viz_cmd = app.add_subcommand("export-viz", "edge weights, degrees and similarities for one article");
    viz_cmd->add_option("--checkpoint", ckpt)->required();
    viz_cmd->add_option("--data", data)->required();
    viz_cmd->add_option("--id", id)->required();
    viz_cmd->add_option("--ablate", eval_ablate);
    viz_cmd->add_option("--embeddings", embeddings);
    viz_cmd->add_option("--out", out);

    auto* gc_cmd = app.add_subcommand("gradcheck", "central-difference check of every backward pass");
    gc_cmd->add_option("--seed", gc_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "break_cli: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*train_cmd) return cmd_train(data, config, out, embeddings, o);
        if (*eval_cmd) return cmd_eval(ckpt, data, split, embeddings, out, eval_ablate);
        if (*infer_cmd) return cmd_infer(ckpt, data, id, embeddings, out);
        if (*viz_cmd) return cmd_export_viz(ckpt, data, id, embeddings, out, eval_ablate);
        if (*gc_cmd) return cmd_gradcheck(gc_seed);
        if (*gen_cmd) {
            const auto corpus = generate_synthetic(spec);
            write_dataset(out, corpus.articles);
            if (!signals.empty()) write_file_atomic(signals, json(corpus.signal_sentences).dump(2) + "\n");
            spdlog::info("wrote {} articles to {}", corpus.articles.size(), out);
            return 0;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "break_cli: " << msg << "\n";
        return 1;
    }
    return 1;
}
