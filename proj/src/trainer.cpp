#include "csib/trainer.hpp"

#include <algorithm>

#include <json.hpp>

#include "csib/optim.hpp"
#include "csib/util.hpp"

namespace csib {

BatchSampler::BatchSampler(std::vector<std::size_t> pool, std::size_t batch_size,
                           std::uint64_t seed)
    : pool_(std::move(pool)),
      batch_(std::min(batch_size, pool_.size())),
      rng_(seed),
      cursor_(pool_.size()) {
  require(!pool_.empty(), "BatchSampler: empty sample pool");
  require(batch_ >= 1, "BatchSampler: batch size must be >= 1");
}

std::vector<std::size_t> BatchSampler::next() {
  if (cursor_ + batch_ > pool_.size()) {
    rng_.shuffle(pool_);
    cursor_ = 0;
  }
  std::vector<std::size_t> batch(pool_.begin() + cursor_,
                                 pool_.begin() + cursor_ + batch_);
  cursor_ += batch_;
  return batch;
}

std::string metric_log_to_json(const MetricLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& entry : log) {
    nlohmann::json obj;
    obj["stage"] = entry.stage;
    obj["iteration"] = entry.iteration;
    for (const auto& [name, value] : entry.values) obj[name] = value;
    arr.push_back(obj);
  }
  return arr.dump(2) + "\n";
}

namespace {

void log_entry(MetricLog* log, int stage, std::size_t iteration,
               std::vector<std::pair<std::string, double>> values) {
  if (!log) return;
  log->push_back({stage, iteration, std::move(values)});
}

bool should_log(std::size_t t, std::size_t iters, std::size_t interval) {
  return t % interval == 0 || t + 1 == iters;
}

// B x A matrix of predicted attribute probabilities for a batch.
Matrix predict_batch(const CsibModel& model, const Dataset& ds,
                     std::span<const std::size_t> batch) {
  Matrix attrs(batch.size(), model.num_attributes());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Vector a = predict_attributes(model.predictor, ds.samples[batch[b]].features);
    std::copy(a.begin(), a.end(), attrs.row(b).begin());
  }
  return attrs;
}

}  // namespace

Stage3Grads stage3_loss_and_grads(const CsibModel& model, const Dataset& task_ds,
                                  std::span<const std::size_t> task_batch,
                                  const Dataset& attr_ds,
                                  std::span<const std::size_t> attr_batch,
                                  double lambda) {
  require(lambda >= 0.0, "stage3_loss_and_grads: lambda must be >= 0");
  require(!task_batch.empty(), "stage3_loss_and_grads: empty task batch");

  Stage3Grads out;
  out.d_pred_weights = Matrix(model.num_attributes(), model.feature_dim());
  out.d_pred_bias.assign(model.num_attributes(), 0.0);
  out.d_g = Matrix(model.num_groups(), model.num_attributes());
  out.d_w_out = Matrix(model.num_outputs(), model.num_groups());

  const double batch_scale = 1.0 / static_cast<double>(task_batch.size());
  Vector d_logit(model.num_attributes());
  for (std::size_t idx : task_batch) {
    require(idx < task_ds.size(), "stage3_loss_and_grads: task index out of range");
    const SampleRecord& s = task_ds.samples[idx];
    require(s.target.has_value(), "stage3_loss_and_grads: task sample " +
                                      std::to_string(idx) + " has no target");

    const Vector a = predict_attributes(model.predictor, s.features);
    const Vector z = group_forward(a, model.grouping, model.eps);
    const MultiKResult mk = multi_k_loss(z, model.output, *s.target);
    out.l_y += mk.loss * batch_scale;

    const double scale = lambda * batch_scale;
    if (scale == 0.0) continue;
    for (std::size_t i = 0; i < out.d_w_out.size(); ++i)
      out.d_w_out.data()[i] += scale * mk.d_w.data()[i];

    Vector d_z(mk.d_z.size());
    for (std::size_t i = 0; i < d_z.size(); ++i) d_z[i] = scale * mk.d_z[i];
    const auto [d_a, d_g] = group_backward(a, model.grouping, d_z, model.eps);
    for (std::size_t i = 0; i < out.d_g.size(); ++i)
      out.d_g.data()[i] += d_g.data()[i];

    for (std::size_t j = 0; j < d_logit.size(); ++j)
      d_logit[j] = d_a[j] * a[j] * (1.0 - a[j]);
    out.d_pred_weights.add_outer(d_logit, s.features, 1.0);
    for (std::size_t j = 0; j < d_logit.size(); ++j)
      out.d_pred_bias[j] += d_logit[j];
  }

  const BceResult bce = bce_loss_and_grads(model.predictor, attr_ds, attr_batch);
  out.l_attr = bce.loss;
  for (std::size_t i = 0; i < out.d_pred_weights.size(); ++i)
    out.d_pred_weights.data()[i] += bce.d_weights.data()[i];
  for (std::size_t j = 0; j < out.d_pred_bias.size(); ++j)
    out.d_pred_bias[j] += bce.d_bias[j];

  out.total = out.l_attr + lambda * out.l_y;
  return out;
}

void stage1_train_attributes(CsibModel& model, const Dataset& attr_ds,
                             const TrainConfig& config, MetricLog* log) {
  const auto labeled = attr_ds.attribute_labeled_indices();
  require(!labeled.empty(), "stage 1: dataset has no attribute labels");

  BatchSampler sampler(labeled, config.attr_batch,
                       derive_seed(config.seed, kStreamStage1Sampler));
  OptimizerState w_state(model.predictor.weights.size(), config.stage1_lr,
                         config.momentum);
  OptimizerState b_state(model.predictor.bias.size(), config.stage1_lr,
                         config.momentum);
  const auto decay_steps = config.stage1_decay_steps();

  for (std::size_t t = 0; t < config.stage1_iters; ++t) {
    const double lr = learning_rate_schedule(config.stage1_lr, t, decay_steps,
                                             config.decay_factor);
    w_state.learning_rate = lr;
    b_state.learning_rate = lr;

    const auto batch = sampler.next();
    const BceResult bce = bce_loss_and_grads(model.predictor, attr_ds, batch);
    sgd_step(model.predictor.weights.data(), bce.d_weights.data(), w_state,
             "predictor weights");
    sgd_step(model.predictor.bias, bce.d_bias, b_state, "predictor bias");

    if (should_log(t, config.stage1_iters, config.log_interval))
      log_entry(log, 1, t, {{"l_attr", bce.loss}, {"lr", lr}});
  }

  model.meta.stage1_iterations += config.stage1_iters;
  model.meta.stage_completed = std::max(model.meta.stage_completed, 1);
}

void stage2_pretrain_groups(CsibModel& model, const Dataset& ds,
                            const TrainConfig& config, MetricLog* log) {
  require(model.meta.stage_completed >= 1,
          "stage 2 requires a completed stage 1");
  require(config.pretrain_batch >= 2, "stage 2: batch size must be >= 2");

  std::vector<std::size_t> all(ds.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  BatchSampler sampler(std::move(all), config.pretrain_batch,
                       derive_seed(config.seed, kStreamStage2Sampler));
  OptimizerState g_state(model.grouping.g.size(), config.stage2_lr,
                         config.momentum);

  for (std::size_t t = 0; t < config.stage2_iters; ++t) {
    const auto batch = sampler.next();
    const Matrix attrs = predict_batch(model, ds, batch);
    const Matrix zbatch = group_forward_batch(attrs, model.grouping, model.eps);
    const PretrainLosses losses =
        pretrain_losses(zbatch, config.loff_variant, model.eps);
    const GroupBackwardResult bwd =
        group_backward(attrs, model.grouping, losses.d_z, model.eps);

    sgd_step(model.grouping.g.data(), bwd.d_g.data(), g_state, "grouping matrix");
    model.grouping.project_rows();

    if (should_log(t, config.stage2_iters, config.log_interval))
      log_entry(log, 2, t,
                {{"l_groups", losses.total},
                 {"l_on", losses.l_on},
                 {"l_off", losses.l_off},
                 {"l_h", losses.l_h}});
  }

  model.meta.stage2_iterations += config.stage2_iters;
  model.meta.stage_completed = std::max(model.meta.stage_completed, 2);
}

void stage3_finetune(CsibModel& model, const Dataset& task_ds,
                     const Dataset& attr_ds, const TrainConfig& config,
                     MetricLog* log) {
  require(model.meta.stage_completed >= 2,
          "stage 3 requires a completed stage 2");
  const auto task_labeled = task_ds.target_labeled_indices();
  require(!task_labeled.empty(), "stage 3: task dataset has no targets");
  const auto attr_labeled = attr_ds.attribute_labeled_indices();
  require(!attr_labeled.empty(), "stage 3: attribute dataset has no labels");

  if (!model.meta.bias_initialized) {
    std::vector<Vector> targets;
    targets.reserve(task_labeled.size());
    for (std::size_t idx : task_labeled)
      targets.push_back(*task_ds.samples[idx].target);
    init_bias_from_targets(model.output, targets);
    model.meta.bias_initialized = true;
  }

  BatchSampler task_sampler(task_labeled, config.task_batch,
                            derive_seed(config.seed, kStreamStage3TaskSampler));
  BatchSampler attr_sampler(attr_labeled, config.attr_batch,
                            derive_seed(config.seed, kStreamStage3AttrSampler));

  OptimizerState pw_state(model.predictor.weights.size(), config.stage3_lr,
                          config.momentum);
  OptimizerState pb_state(model.predictor.bias.size(), config.stage3_lr,
                          config.momentum);
  OptimizerState g_state(model.grouping.g.size(), config.stage3_lr,
                         config.momentum);
  OptimizerState w_state(model.output.w.size(), config.stage3_lr,
                         config.momentum);
  const auto decay_steps = config.stage3_decay_steps();

  for (std::size_t t = 0; t < config.stage3_iters; ++t) {
    const double lr = learning_rate_schedule(config.stage3_lr, t, decay_steps,
                                             config.decay_factor);
    pw_state.learning_rate = lr;
    pb_state.learning_rate = lr;
    g_state.learning_rate = lr;
    w_state.learning_rate = lr;

    const auto task_batch = task_sampler.next();
    const auto attr_batch = attr_sampler.next();
    const Stage3Grads grads = stage3_loss_and_grads(
        model, task_ds, task_batch, attr_ds, attr_batch, config.lambda);

    sgd_step(model.predictor.weights.data(), grads.d_pred_weights.data(),
             pw_state, "predictor weights");
    sgd_step(model.predictor.bias, grads.d_pred_bias, pb_state, "predictor bias");
    sgd_step(model.grouping.g.data(), grads.d_g.data(), g_state,
             "grouping matrix");
    sgd_step(model.output.w.data(), grads.d_w_out.data(), w_state,
             "output weights");
    model.grouping.project_rows();

    if (should_log(t, config.stage3_iters, config.log_interval))
      log_entry(log, 3, t,
                {{"l_attr", grads.l_attr},
                 {"l_y", grads.l_y},
                 {"l_total", grads.total},
                 {"lr", lr}});
  }

  model.meta.stage3_iterations += config.stage3_iters;
  model.meta.stage_completed = 3;
}

std::pair<CsibModel, MetricLog> run_pipeline(const TrainConfig& config,
                                             const Dataset& task_ds,
                                             const Dataset& attr_ds) {
  require(task_ds.feature_dim == attr_ds.feature_dim,
          "run_pipeline: task and attribute feature dims differ");
  CsibModel model = make_model(task_ds.feature_dim, attr_ds.attribute_dim,
                               config.num_groups, task_ds.target_dim,
                               config.seed);
  model.eps = config.eps;
  model.output.k_set = config.resolved_k_set();
  model.output.k_eval = config.resolved_k_eval();
  model.output.rule = config.topk_rule;
  model.validate();

  MetricLog log;
  stage1_train_attributes(model, attr_ds, config, &log);
  stage2_pretrain_groups(model, task_ds, config, &log);
  stage3_finetune(model, task_ds, attr_ds, config, &log);
  return {std::move(model), std::move(log)};
}

}  // namespace csib
