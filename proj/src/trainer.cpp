#include "brk/trainer.hpp"

#include <cmath>
#include <exception>
#include <numeric>
#include <stdexcept>

#include "brk/log.hpp"
#include "brk/rng.hpp"

namespace bnews {

namespace {

struct ArticleWork {
    ModelGrads grads;
    double loss_cls = 0.0;
    double loss_kl = 0.0;
};

ArticleWork article_gradients(const EncodedArticle& a, const DenoiseParams& phi,
                              const ModelParams& theta, Ablation ablation, double w_cls,
                              double w_kl) {
    auto tr = forward_encoded(a, phi, theta, ablation);
    ArticleWork w;
    w.loss_cls = tr.loss_cls;
    w.loss_kl = tr.loss_kl;
    w.grads = model_backward(a, phi, theta, tr, w_cls, w_kl);
    return w;
}

std::string batch_ids(const Batch& batch) {
    std::string ids;
    for (const auto* a : batch) {
        if (!ids.empty()) ids += ",";
        ids += a->id;
    }
    return ids;
}

void check_batch(const Batch& batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
}

// Forward-pass failures (e.g. a NaN probability reaching bce_loss) get the batch ids attached.
BatchLoss step_gradients(ParamStore& store, const Batch& batch, Ablation ablation, double w_kl,
                         Execution exec, const char* level) {
    check_batch(batch);
    try {
        return accumulate_batch_gradients(store, batch, ablation, 1.0, w_kl, exec);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(level) + " step failed on batch [" + batch_ids(batch) +
                                 "]: " + e.what());
    }
}

}  // namespace

ModelShape TrainConfig::shape(std::size_t d_img) const {
    return {d, h, hidden_mid(), d_img, ablation};
}

Vectorizers TrainConfig::hash_vectorizers() const {
    return {SentenceVectorizer::hash(node_seed, d), SentenceVectorizer::hash(seq_seed, d)};
}

void TrainConfig::validate() const {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(lr_inner > 0.0) || !(lr_outer > 0.0)) throw std::invalid_argument("learning rates must be > 0");
    if (patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (d == 0 || h == 0) throw std::invalid_argument("dimensions must be positive");
    if (node_seed == seq_seed) throw std::invalid_argument("node_seed and seq_seed must differ");
    AdamConfig{lr_inner, adam_beta1, adam_beta2, adam_epsilon}.validate();
}

BatchLoss accumulate_batch_gradients(ParamStore& store, const Batch& batch, Ablation ablation,
                                     double w_cls, double w_kl, Execution exec) {
    check_batch(batch);
    const DenoiseParams phi = denoise_params(store);
    const ModelParams theta = model_params(store);
    const double inv = 1.0 / static_cast<double>(batch.size());
    const double a_cls = w_cls * inv;
    const double a_kl = w_kl * inv;
    BatchLoss loss;

    if (exec == Execution::serial) {
        for (const auto* a : batch) {
            auto w = article_gradients(*a, phi, theta, ablation, a_cls, a_kl);
            accumulate_grads(store, w.grads);
            loss.cls += w.loss_cls;
            loss.kl += w.loss_kl;
        }
    } else {
        std::vector<ArticleWork> work(batch.size());
        std::vector<std::exception_ptr> errors(batch.size());
        const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            try {
                work[k] = article_gradients(*batch[k], phi, theta, ablation, a_cls, a_kl);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
        for (const auto& w : work) {
            accumulate_grads(store, w.grads);
            loss.cls += w.loss_cls;
            loss.kl += w.loss_kl;
        }
    }
    loss.cls *= inv;
    loss.kl *= inv;
    return loss;
}

double inner_step(ParamStore& store, const Batch& batch, const TrainConfig& cfg, Execution exec) {
    store.zero_grads();
    const auto loss = step_gradients(store, batch, cfg.ablation, 0.0, exec, "inner");
    if (!std::isfinite(loss.cls))
        throw std::runtime_error("non-finite inner loss on batch [" + batch_ids(batch) + "]");
    adam_step(store, {cfg.lr_inner, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon},
              phi_names(store));
    store.zero_grads();
    return loss.cls;
}

double outer_step(ParamStore& store, const Batch& batch, const TrainConfig& cfg, Execution exec) {
    store.zero_grads();
    const auto loss = step_gradients(store, batch, cfg.ablation, cfg.beta, exec, "outer");
    const double total = loss.cls + cfg.beta * loss.kl;
    if (!std::isfinite(total))
        throw std::runtime_error("non-finite outer loss on batch [" + batch_ids(batch) + "]");
    adam_step(store, {cfg.lr_outer, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_epsilon},
              theta_names(store));
    store.zero_grads();
    return total;
}

std::vector<double> predict(const ParamStore& store, std::span<const EncodedArticle> articles,
                            Ablation ablation) {
    const DenoiseParams phi = denoise_params(store);
    const ModelParams theta = model_params(store);
    std::vector<double> probs(articles.size());
    const auto n = static_cast<std::ptrdiff_t>(articles.size());
    std::vector<std::exception_ptr> errors(articles.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            probs[k] = forward_encoded(articles[k], phi, theta, ablation).pred.prob;
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return probs;
}

MetricsReport evaluate(const ParamStore& store, std::span<const EncodedArticle> articles,
                       Ablation ablation) {
    const auto probs = predict(store, articles, ablation);
    std::vector<int> labels;
    labels.reserve(articles.size());
    for (const auto& a : articles) labels.push_back(a.label);
    return evaluate_metrics(probs, labels);
}

std::vector<EncodedArticle> encode_all(std::span<const NewsArticle> articles,
                                       const Vectorizers& vectorizers) {
    std::vector<EncodedArticle> out;
    out.reserve(articles.size());
    for (const auto& a : articles) out.push_back(encode_article(a, vectorizers.node, vectorizers.seq));
    return out;
}

std::size_t image_dim(std::span<const EncodedArticle> articles) {
    std::size_t dim = 0;
    for (const auto& a : articles) {
        if (a.images.rows() == 0) continue;
        if (dim != 0 && a.images.cols() != dim)
            throw std::invalid_argument("article '" + a.id + "': image vectors have width " +
                                        std::to_string(a.images.cols()) + ", expected " +
                                        std::to_string(dim));
        dim = a.images.cols();
    }
    return dim;
}

TrainResult train(std::span<const EncodedArticle> train_set,
                  std::span<const EncodedArticle> val_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train: train and validation splits must be non-empty");
    init_logging();

    TrainResult result;
    result.image_dim = std::max(image_dim(train_set), image_dim(val_set));
    ParamStore store = init_params(cfg.shape(result.image_dim), cfg.seed);
    result.params = store;
    if (cfg.max_epochs == 0) return result;

    Rng order_rng(cfg.seed ^ 0x5eed0f0a11ba7c4eULL);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    double best_f1 = -1.0;
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            Batch batch;
            for (std::size_t i = start; i < std::min(order.size(), start + cfg.batch_size); ++i)
                batch.push_back(&train_set[order[i]]);
            for (std::size_t k = 0; k < cfg.inner_steps_per_batch; ++k) inner_step(store, batch, cfg);
            loss_sum += outer_step(store, batch, cfg);
            ++batches;
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(batches);
        rec.val = evaluate(store, val_set, cfg.ablation);
        result.history.push_back(rec);
        spdlog::info("epoch {:3d} loss {:.6f} val acc {:.4f} f1 {:.4f}", epoch, rec.train_loss,
                     rec.val.accuracy, rec.val.f1);

        if (rec.val.f1 > best_f1) {
            best_f1 = rec.val.f1;
            result.params = store;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            spdlog::debug("early stop after epoch {}", epoch);
            break;
        }
    }
    result.best_val_f1 = best_f1;
    result.params.zero_grads();
    return result;
}

}  // namespace bnews
