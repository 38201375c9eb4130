// Copyright 2026 The synclift Authors
// SPDX-License-Identifier: Apache-2.0

#include <synclift/trainer.hpp>

#include <synclift/config.hpp>
#include <synclift/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace synclift {
namespace {

using nn::Tensor;

ModelConfig fit_to_topology(ModelConfig c, const SkeletonTopology& t) {
  c.num_joints = t.num_joints();
  c.num_bones = t.num_bones();
  return c;
}

std::vector<nn::NamedTensor> with_prefix(const std::vector<nn::NamedTensor>& all, const std::string& prefix) {
  std::vector<nn::NamedTensor> out;
  for (const auto& p : all) {
    if (p.name.rfind(prefix, 0) == 0) out.push_back(p);
  }
  return out;
}

AdamConfig adam_config(const TrainConfig& c) { return {c.learning_rate, c.beta1, c.beta2, c.adam_eps}; }

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(static_cast<Index>(idx[i]));
  return out;
}

bool finite(double v) { return std::isfinite(v); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_loss_row(std::ostream& os, long step, const LossBundle& l) {
  os << step << ',' << fmt(l.l_dis) << ',' << fmt(l.l_gen) << ',' << fmt(l.l_rep) << ',' << fmt(l.l_angle) << '\n';
}

}  // namespace

std::string to_string(LipschitzMode mode) { return mode == LipschitzMode::kClip ? "clip" : "gradient-penalty"; }

LipschitzMode lipschitz_mode_from_string(const std::string& s) {
  if (s == "clip") return LipschitzMode::kClip;
  if (s == "gradient-penalty" || s == "gp") return LipschitzMode::kGradientPenalty;
  throw UsageError("unknown lipschitz mode '" + s + "' (expected clip or gradient-penalty)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw UsageError("learning_rate must be positive");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) throw UsageError("Adam betas must lie in [0, 1)");
  if (!(adam_eps > 0)) throw UsageError("adam_eps must be positive");
  if (!(lambda >= 0)) throw UsageError("lambda must be non-negative");
  if (batch_size < 2) throw UsageError("batch_size must be at least 2 (batch normalization)");
  if (epochs < 0) throw UsageError("epochs must be non-negative");
  if (critic_steps_per_gen_step < 1) throw UsageError("critic_steps_per_gen_step must be at least 1");
  if (lipschitz_mode == LipschitzMode::kClip && !(clip_bound > 0)) throw UsageError("clip_bound must be positive");
  if (lipschitz_mode == LipschitzMode::kGradientPenalty && !(penalty_weight >= 0)) {
    throw UsageError("penalty_weight must be non-negative");
  }
  if (reprojection_pretrain_epochs < 0) throw UsageError("reprojection_pretrain_epochs must be non-negative");
  if (!(unpaired_fraction > 0 && unpaired_fraction < 1)) throw UsageError("unpaired_fraction must lie in (0, 1)");
  if (checkpoint_every < 0) throw UsageError("checkpoint_every must be non-negative");
}

Trainer::Trainer(const SkeletonTopology& topology, const ModelConfig& model_config, const TrainConfig& config,
                 std::uint64_t seed)
    : topology_(topology),
      config_(config),
      cache_(topology_),
      kcs_(cache_, config.use_weighted_kcs ? KcsMode::kWeighted : KcsMode::kPlain, config.kcs_combine),
      angle_(topology_.num_joints(), topology_.special(), AngleLossOptions{1e-8, config.strict_angle}),
      model_(fit_to_topology(model_config, topology_)),
      rng_(derive_seed(seed, "train.loop")),
      gen_opt_(with_prefix(model_.parameters(), "generator."), adam_config(config)),
      rep_opt_(with_prefix(model_.parameters(), "reprojector."), adam_config(config)),
      critic_opt_(with_prefix(model_.parameters(), "critic."), adam_config(config)),
      seed_(seed) {
  config_.validate();
  model_.init(derive_seed(seed, "train.init"));
  enforce_lipschitz();
}

double Trainer::critic_step(const TrainBatch& batch) {
  const nn::ForwardContext train{true, &rng_};
  Tensor y_fake, x_fake;
  {
    nn::NoGradGuard no_grad;
    const Tensor x = Tensor::constant(batch.x2d);
    y_fake = assemble_3d(x, model_.generator.forward(x, train));
    const nn::ForwardContext rep_ctx{config_.synchronous, &rng_};
    x_fake = model_.reprojector.forward(y_fake, rep_ctx);
  }
  const Tensor y_real = Tensor::constant(batch.y3d_real);
  const Tensor x_real = Tensor::constant(batch.x2d_real);
  const Tensor k_real = kcs_(y_real);
  const Tensor k_fake = kcs_(y_fake);

  critic_opt_.zero_grad();
  const Tensor p_real = model_.critic.forward(y_real, x_real, k_real, train);
  const Tensor p_fake = model_.critic.forward(y_fake, x_fake, k_fake, train);
  Tensor loss = critic_loss(p_fake, p_real);
  if (config_.lipschitz_mode == LipschitzMode::kGradientPenalty && config_.penalty_weight > 0) {
    loss = nn::add(loss, gradient_penalty(y_real, x_real, k_real, y_fake, x_fake, k_fake));
  }
  const double value = loss.item();
  if (!finite(value)) throw NumericalError("critic loss is not finite");
  nn::backward(loss);
  critic_opt_.step();
  enforce_lipschitz();
  ++counts_.critic;
  return value;
}

LossBundle Trainer::generator_step(const TrainBatch& batch) {
  const nn::ForwardContext train{true, &rng_};
  const nn::ForwardContext rep_ctx{config_.synchronous, &rng_};
  const Tensor x = Tensor::constant(batch.x2d);
  const Tensor y_pred = assemble_3d(x, model_.generator.forward(x, train));
  const Tensor x_rep = model_.reprojector.forward(y_pred, rep_ctx);
  const Tensor p_fake = model_.critic.forward(y_pred, x_rep, kcs_(y_pred), train);

  const Tensor l_rep = reprojection_loss(p_fake);
  const Tensor l_angle = angle_(y_pred);
  const Tensor l_gen = generator_loss(p_fake, l_angle, static_cast<Scalar>(config_.lambda));

  LossBundle out;
  out.lambda = config_.lambda;
  out.l_rep = l_rep.item();
  out.l_angle = l_angle.item();
  out.l_gen = l_gen.item();
  if (!finite(out.l_gen) || !finite(out.l_rep) || !finite(out.l_angle)) {
    throw NumericalError("generator loss is not finite");
  }

  // The angle term does not reach the reprojection net, so one backward pass
  // of L_gen leaves dL_rep/d(theta_R) in the reprojector's gradients.
  gen_opt_.zero_grad();
  rep_opt_.zero_grad();
  critic_opt_.zero_grad();
  nn::backward(l_gen);
  gen_opt_.step();
  ++counts_.generator;
  if (config_.synchronous) {
    rep_opt_.step();
    ++counts_.reprojector;
  }
  critic_opt_.zero_grad();
  return out;
}

double Trainer::reprojection_pretrain_step(const Matrix& y3d, const Matrix& x2d) {
  const nn::ForwardContext train{true, &rng_};
  const Tensor out = model_.reprojector.forward(Tensor::constant(y3d), train);
  const Tensor loss = nn::mean(nn::pow(nn::sub(out, Tensor::constant(x2d)), 2));
  const double value = loss.item();
  if (!finite(value)) throw NumericalError("reprojection pretraining loss is not finite");
  rep_opt_.zero_grad();
  nn::backward(loss);
  rep_opt_.step();
  ++counts_.reprojector;
  return value;
}

LossBundle Trainer::train_step(const TrainBatch& batch) {
  if (!batch.x2d.allFinite() || !batch.y3d_real.allFinite() || !batch.x2d_real.allFinite()) {
    throw InputError("training batch contains non-finite values");
  }
  double l_dis = 0;
  LossBundle out;
  try {
    for (int i = 0; i < config_.critic_steps_per_gen_step; ++i) l_dis = critic_step(batch);
    out = generator_step(batch);
  } catch (const InputError& e) {
    // the batch is finite, so this came from a diverged intermediate
    throw NumericalError(std::string("training step diverged: ") + e.what());
  }
  out.l_dis = l_dis;
  check_finite("training step");
  return out;
}

void Trainer::enforce_lipschitz() {
  if (config_.lipschitz_mode != LipschitzMode::kClip) return;
  const Scalar c = static_cast<Scalar>(config_.clip_bound);
  for (auto& p : critic_opt_.params()) {
    auto t = p.tensor;
    t.mutable_value() = t.value().cwiseMax(-c).cwiseMin(c);
  }
}

Tensor Trainer::gradient_penalty(const Tensor& y_real, const Tensor& x_real, const Tensor& k_real,
                                 const Tensor& y_fake, const Tensor& x_fake, const Tensor& k_fake) {
  const Index b = y_real.rows();
  if (y_fake.rows() != b) throw ShapeError("gradient penalty needs equally sized real and fake batches");
  ColVector eps(b);
  for (Index i = 0; i < b; ++i) eps(i) = static_cast<Scalar>(rng_.uniform());
  auto mix = [&](const Tensor& r, const Tensor& f) {
    Matrix m = (r.value().array().colwise() * eps.array() + f.value().array().colwise() * (1 - eps.array())).matrix();
    return Tensor::parameter(std::move(m));
  };
  const Tensor y = mix(y_real, y_fake);
  const Tensor x = mix(x_real, x_fake);
  const Tensor k = mix(k_real, k_fake);
  const nn::ForwardContext ctx{true, &rng_};
  const Tensor score = nn::sum(model_.critic.forward(y, x, k, ctx));
  const auto g = nn::grad(score, {y, x, k}, /*create_graph=*/true);
  Tensor sq = nn::add(nn::add(nn::sum_cols(nn::pow(g[0], 2)), nn::sum_cols(nn::pow(g[1], 2))),
                      nn::sum_cols(nn::pow(g[2], 2)));
  const Tensor norm = nn::pow(nn::add_scalar(sq, Scalar(1e-12)), 0.5);
  return nn::scale(nn::mean(nn::pow(nn::add_scalar(norm, Scalar(-1)), 2)), static_cast<Scalar>(config_.penalty_weight));
}

void Trainer::check_finite(const char* what) const {
  for (const auto& p : model_.parameters()) {
    if (!p.tensor.value().allFinite()) {
      throw NumericalError(std::string(what) + ": parameter " + p.name + " is not finite");
    }
  }
}

Checkpoint Trainer::snapshot() const {
  Checkpoint c;
  c.topology_hash = topology_.hash_hex();
  c.seed = seed_;
  auto& model = const_cast<LiftingModel&>(model_);
  store_model(model, c);
  store_optimizer(gen_opt_, c);
  store_optimizer(rep_opt_, c);
  store_optimizer(critic_opt_, c);
  c.config = to_json(config_);
  c.metadata = {{"updates",
                 {{"generator", counts_.generator}, {"reprojector", counts_.reprojector}, {"critic", counts_.critic}}},
                {"rng_state", rng_.state()}};
  return c;
}

void Trainer::restore(const Checkpoint& checkpoint) {
  if (checkpoint.topology_hash != topology_.hash_hex()) {
    throw FormatError("checkpoint topology " + checkpoint.topology_hash + " does not match " + topology_.hash_hex());
  }
  restore_model(checkpoint, model_);
  restore_optimizer(checkpoint, gen_opt_);
  restore_optimizer(checkpoint, rep_opt_);
  restore_optimizer(checkpoint, critic_opt_);
  if (checkpoint.metadata.contains("rng_state")) rng_.set_state(checkpoint.metadata.at("rng_state").get<std::string>());
  if (checkpoint.metadata.contains("updates")) {
    const auto& u = checkpoint.metadata.at("updates");
    counts_.generator = u.at("generator").get<long>();
    counts_.reprojector = u.at("reprojector").get<long>();
    counts_.critic = u.at("critic").get<long>();
  }
}

TrainingData prepare_training_data(const Dataset& train, const Dataset& validation, const SkeletonTopology& topology,
                                   const TrainConfig& config, double input_noise_sigma, double validation_noise_sigma,
                                   std::uint64_t noise_seed) {
  validate_dataset(train, topology);
  if (train.header.corpus != Corpus::k3D) throw FormatError("training needs a 3D corpus file");
  const NormalizeOptions norm{config.normalize_include_root};

  Dataset inputs;
  Dataset reals;
  if (config.paired) {
    inputs = train;
    reals = train;
  } else {
    std::tie(inputs, reals) = split_unpaired(train, config.unpaired_fraction);
  }
  if (input_noise_sigma > 0) {
    Rng rng(derive_seed(noise_seed, "noise.train"));
    inputs = add_2d_noise(inputs, input_noise_sigma, rng);
  }
  TrainingData data;
  data.inputs2d = to_arrays(inputs, topology, norm);
  data.real3d = to_arrays(reals, topology, norm);
  if (!validation.samples.empty()) {
    validate_dataset(validation, topology);
    Dataset val = validation;
    if (validation_noise_sigma > 0) {
      Rng rng(derive_seed(noise_seed, "noise.validation"));
      val = add_2d_noise(val, validation_noise_sigma, rng);
    }
    data.validation = to_arrays(val, topology, norm);
  }
  if (config.paired) {
    // Keep the pairing but drop the 3D from the generator side.
    data.inputs2d.y3d.resize(0, data.inputs2d.y3d.cols());
    data.inputs2d.ratio3d.clear();
  }
  return data;
}

TrainingResult run_training(const TrainingData& data, const SkeletonTopology& topology,
                            const ModelConfig& model_config, const TrainConfig& config, std::uint64_t seed,
                            const RunOptions& options) {
  config.validate();
  const Index n2d = data.inputs2d.size();
  const Index n3d = data.real3d.size();
  if (n2d < 2 || n3d < 2) throw UsageError("training needs at least two 2D inputs and two 3D poses");
  if (config.paired && n2d != n3d) throw UsageError("paired training needs equally sized corpora");

  Trainer trainer(topology, model_config, config, seed);
  Rng& rng = trainer.rng();
  const bool has_val = data.validation.size() > 0 && data.validation.has_3d();

  std::optional<std::ofstream> log_file;
  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    log_file.emplace(*options.out_dir / "losses.csv");
    if (!*log_file) throw Error("cannot write " + (*options.out_dir / "losses.csv").string());
  }
  nlohmann::json effective = {{"seed", seed},
                              {"model", to_json(trainer.model().config)},
                              {"train", to_json(config)},
                              {"provenance", options.provenance}};
  auto log = [&](const std::string& line) {
    if (options.loss_log) *options.loss_log << line;
    if (log_file) *log_file << line;
  };
  log("# config " + effective.dump() + "\n");
  log("step,l_dis,l_gen,l_rep,l_angle\n");

  TrainingResult result;
  if (has_val) result.initial_report = evaluate(trainer.model().generator, data.validation, options.eval);

  const Index batch = std::min<Index>(config.batch_size, std::min(n2d, n3d));
  const Index per_epoch = std::max<Index>(1, n2d / batch);

  auto make_checkpoint = [&](int epoch) {
    Checkpoint c = trainer.snapshot();
    c.config = effective;
    c.metadata["epoch"] = epoch;
    c.metadata["iterations"] = result.iterations;
    return c;
  };
  auto save_to = [&](const Checkpoint& c, const std::string& name) {
    if (options.out_dir) save_checkpoint(c, *options.out_dir / name);
  };

  if (!config.synchronous) {
    for (int e = 0; e < config.reprojection_pretrain_epochs; ++e) {
      const auto perm = rng.permutation(static_cast<std::size_t>(n3d));
      for (Index i = 0; i + batch <= n3d; i += batch) {
        std::vector<std::size_t> idx(perm.begin() + i, perm.begin() + i + batch);
        trainer.reprojection_pretrain_step(gather_rows(data.real3d.y3d, idx), gather_rows(data.real3d.x2d, idx));
      }
    }
  }

  Checkpoint last_good = make_checkpoint(0);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto perm2d = rng.permutation(static_cast<std::size_t>(n2d));
    const auto perm3d = config.paired ? perm2d : rng.permutation(static_cast<std::size_t>(n3d));
    LossBundle sum;
    sum.lambda = config.lambda;
    for (Index it = 0; it < per_epoch; ++it) {
      std::vector<std::size_t> idx2d(static_cast<std::size_t>(batch));
      std::vector<std::size_t> idx3d(static_cast<std::size_t>(batch));
      for (Index j = 0; j < batch; ++j) {
        const auto k = static_cast<std::size_t>(it * batch + j);
        idx2d[static_cast<std::size_t>(j)] = perm2d[k % perm2d.size()];
        idx3d[static_cast<std::size_t>(j)] = perm3d[k % perm3d.size()];
      }
      TrainBatch b{gather_rows(data.inputs2d.x2d, idx2d), gather_rows(data.real3d.y3d, idx3d),
                   gather_rows(data.real3d.x2d, idx3d)};
      LossBundle l;
      try {
        l = trainer.train_step(b);
      } catch (const NumericalError&) {
        if (options.out_dir) save_checkpoint(last_good, *options.out_dir / "last_good.ckpt");
        throw;
      }
      ++result.iterations;
      {
        std::ostringstream row;
        write_loss_row(row, result.iterations, l);
        log(row.str());
      }
      sum.l_dis += l.l_dis;
      sum.l_gen += l.l_gen;
      sum.l_rep += l.l_rep;
      sum.l_angle += l.l_angle;
    }
    const double n = static_cast<double>(per_epoch);
    sum.l_dis /= n;
    sum.l_gen /= n;
    sum.l_rep /= n;
    sum.l_angle /= n;
    result.epoch_losses.push_back(sum);
    if (options.on_epoch) options.on_epoch(epoch, sum);
    last_good = make_checkpoint(epoch);
    if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04d.ckpt", epoch);
      save_to(last_good, name);
    }
  }

  result.final_checkpoint = last_good;
  save_to(result.final_checkpoint, "final.ckpt");
  if (has_val) {
    result.final_report = evaluate(trainer.model().generator, data.validation, options.eval);
    if (options.out_dir) {
      std::ofstream rep(*options.out_dir / "report.json");
      nlohmann::json j = {{"config", effective},
                          {"initial", report_to_json(result.initial_report)},
                          {"final", report_to_json(result.final_report)},
                          {"iterations", result.iterations}};
      rep << j.dump(2) << '\n';
    }
  }
  if (log_file) log_file->flush();
  return result;
}

}  // namespace synclift
