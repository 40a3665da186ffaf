#pragma once

#include <string>
#include <utility>
#include <vector>

#include "csib/config.hpp"
#include "csib/dataset.hpp"
#include "csib/model.hpp"

namespace csib {

// Seed streams derived from the config seed, one per consumer, so every
// stage is deterministic on its own and a resumed run replays exactly.
inline constexpr std::uint64_t kStreamStage1Sampler = 0xD1;
inline constexpr std::uint64_t kStreamStage2Sampler = 0xD2;
inline constexpr std::uint64_t kStreamStage3TaskSampler = 0xD3;
inline constexpr std::uint64_t kStreamStage3AttrSampler = 0xD4;

// Serves minibatches of indices from a fixed pool: sequential epochs, a
// seeded shuffle at each epoch start, partial tail batches dropped.
class BatchSampler {
 public:
  BatchSampler(std::vector<std::size_t> pool, std::size_t batch_size,
               std::uint64_t seed);

  std::vector<std::size_t> next();

  std::size_t batch_size() const { return batch_; }

 private:
  std::vector<std::size_t> pool_;
  std::size_t batch_;
  Rng rng_;
  std::size_t cursor_;
};

struct MetricLogEntry {
  int stage = 0;
  std::size_t iteration = 0;
  std::vector<std::pair<std::string, double>> values;
};
using MetricLog = std::vector<MetricLogEntry>;

std::string metric_log_to_json(const MetricLog& log);

// Loss and analytic gradients of the composed finetuning objective
// L_attr + lambda * L_y on one pair of batches. The task batch is pushed
// through predictor -> grouping -> top-K output; the attribute batch through
// the predictor alone.
struct Stage3Grads {
  double total = 0.0;
  double l_attr = 0.0;
  double l_y = 0.0;
  Matrix d_pred_weights;
  Vector d_pred_bias;
  Matrix d_g;
  Matrix d_w_out;
};

Stage3Grads stage3_loss_and_grads(const CsibModel& model, const Dataset& task_ds,
                                  std::span<const std::size_t> task_batch,
                                  const Dataset& attr_ds,
                                  std::span<const std::size_t> attr_batch,
                                  double lambda);

// Stage 1: attribute supervision only. Touches nothing but the predictor.
void stage1_train_attributes(CsibModel& model, const Dataset& attr_ds,
                             const TrainConfig& config, MetricLog* log);

// Stage 2: unsupervised group pretraining with the predictor frozen. Only G
// changes; every SGD step is followed by a row-wise simplex projection.
void stage2_pretrain_groups(CsibModel& model, const Dataset& ds,
                            const TrainConfig& config, MetricLog* log);

// Stage 3: end-to-end finetuning of predictor, G and W on
// L_attr + lambda * L_y. Initializes the frozen output bias from the task
// targets on first entry; the bias never changes afterwards.
void stage3_finetune(CsibModel& model, const Dataset& task_ds,
                     const Dataset& attr_ds, const TrainConfig& config,
                     MetricLog* log);

// All three stages from a fresh model.
std::pair<CsibModel, MetricLog> run_pipeline(const TrainConfig& config,
                                             const Dataset& task_ds,
                                             const Dataset& attr_ds);

}  // namespace csib
