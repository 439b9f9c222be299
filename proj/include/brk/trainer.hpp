#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brk/metrics.hpp"
#include "brk/model.hpp"
#include "brk/param_store.hpp"

namespace bnews {

struct TrainConfig {
    double beta = 0.1;
    double lr_inner = 0.1;
    double lr_outer = 1e-5;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    std::size_t d = 32;
    std::size_t h = 16;
    std::size_t h_mid = 0;  // 0: same as h
    std::size_t batch_size = 8;
    std::size_t patience = 8;
    std::size_t max_epochs = 30;
    std::size_t inner_steps_per_batch = 1;
    std::uint64_t seed = 42;
    std::uint64_t node_seed = 0x6e6f64655f636831ULL;
    std::uint64_t seq_seed = 0x7365715f63686e32ULL;
    std::uint64_t split_seed = 1;  // dataset shuffle before the 8:1:1 cut
    Ablation ablation = Ablation::full;

    std::size_t hidden_mid() const { return h_mid == 0 ? h : h_mid; }
    ModelShape shape(std::size_t d_img) const;
    Vectorizers hash_vectorizers() const;
    void validate() const;
};

enum class Execution { parallel, serial };

using Batch = std::vector<const EncodedArticle*>;

struct BatchLoss {
    double cls = 0.0;  // mean BCE
    double kl = 0.0;   // mean KL
};

/// Adds d(w_cls * mean BCE + w_kl * mean KL)/d(params) over the batch into
/// the store's gradient accumulators. Per-article work can run on OpenMP
/// threads; the reduction always happens in batch order, so both execution
/// modes produce bit-identical gradients.
BatchLoss accumulate_batch_gradients(ParamStore& store, const Batch& batch, Ablation ablation,
                                     double w_cls, double w_kl,
                                     Execution exec = Execution::parallel);

// Inner level: cross-entropy only, updates phi. Returns the batch loss.
double inner_step(ParamStore& store, const Batch& batch, const TrainConfig& cfg,
                  Execution exec = Execution::parallel);

// Outer level: cross-entropy + beta * KL, updates theta.
double outer_step(ParamStore& store, const Batch& batch, const TrainConfig& cfg,
                  Execution exec = Execution::parallel);

std::vector<double> predict(const ParamStore& store, std::span<const EncodedArticle> articles,
                            Ablation ablation);

MetricsReport evaluate(const ParamStore& store, std::span<const EncodedArticle> articles,
                       Ablation ablation);

struct EpochRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;  // mean outer loss over the epoch's batches
    MetricsReport val;
};

struct TrainResult {
    ParamStore params;  // parameters of the best validation epoch
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;  // 0: no epoch ran
    double best_val_f1 = 0.0;
    std::size_t image_dim = 0;
};

/// Alternating bi-level optimization with early stopping on validation F1.
TrainResult train(std::span<const EncodedArticle> train_set,
                  std::span<const EncodedArticle> val_set, const TrainConfig& cfg);

std::vector<EncodedArticle> encode_all(std::span<const NewsArticle> articles,
                                       const Vectorizers& vectorizers);

// Image vector width shared by every article, or 0 when none has images.
std::size_t image_dim(std::span<const EncodedArticle> articles);

}  // namespace bnews
