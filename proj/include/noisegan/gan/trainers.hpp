#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "noisegan/config.hpp"
#include "noisegan/gan/losses.hpp"
#include "noisegan/gan/models.hpp"
#include "noisegan/gan/tensor_io.hpp"

namespace noisegan::gan {

inline std::unique_ptr<torch::optim::Adam> make_adam(std::vector<torch::Tensor> params, double lr,
                                                     const TrainConfig& t) {
  return std::make_unique<torch::optim::Adam>(std::move(params),
                                              torch::optim::AdamOptions(lr).betas({t.beta1, t.beta2}));
}

inline std::vector<torch::Tensor> parameters_of(std::initializer_list<const Net*> nets) {
  std::vector<torch::Tensor> out;
  for (const Net* n : nets) {
    for (auto& p : (*n)->parameters()) out.push_back(p);
  }
  return out;
}

// Common state of the four training procedures. Domain A is clean speech,
// domain B is noisy speech; "generator" always maps A to B.
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg)
      : cfg_(cfg), rng_(cfg.train.seed), sampler_(static_cast<std::size_t>(cfg.pipeline.component_width)) {
    validate(cfg_);
    torch::manual_seed(cfg.train.seed);
  }
  virtual ~Trainer() = default;

  virtual std::vector<std::string> loss_names() const = 0;
  virtual std::vector<double> step(const TrainingData& data, long global_step) = 0;
  virtual std::vector<std::pair<std::string, Net*>> networks() = 0;
  virtual std::vector<std::pair<std::string, torch::optim::Optimizer*>> optimizers() = 0;

  Net& generator() { return *networks().front().second; }
  const RunConfig& config() const { return cfg_; }
  std::mt19937_64& rng() { return rng_; }

  void set_training(bool on) {
    for (auto& [name, net] : networks()) (*net)->train(on);
  }

  std::size_t generator_count() {
    std::size_t n = 0;
    for (auto& [name, net] : networks()) n += name.rfind("generator", 0) == 0;
    return n;
  }

  // Written to a temporary file, then renamed into place.
  void save(const std::filesystem::path& path, int epoch, long global_step) {
    torch::serialize::OutputArchive ar;
    for (auto& [name, net] : networks()) {
      torch::serialize::OutputArchive sub;
      (*net)->save(sub);
      ar.write(name, sub);
    }
    for (auto& [name, opt] : optimizers()) {
      torch::serialize::OutputArchive sub;
      opt->save(sub);
      ar.write("optim_" + name, sub);
    }
    std::ostringstream rng_state;
    rng_state << rng_;
    ar.write("epoch", torch::tensor(static_cast<int64_t>(epoch)));
    ar.write("step", torch::tensor(static_cast<int64_t>(global_step)));
    ar.write("config", c10::IValue(nlohmann::json(cfg_).dump()));
    ar.write("fingerprint", c10::IValue(fingerprint(cfg_)));
    ar.write("family", c10::IValue(cfg_.model.family));
    ar.write("data_rng", c10::IValue(rng_state.str()));
    ar.write("torch_rng", at::detail::getDefaultCPUGenerator().get_state());
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto tmp = path.string() + ".tmp";
    ar.save_to(tmp);
    std::filesystem::rename(tmp, path);
  }

  // Restores every network, optimizer and RNG; returns (epoch, step).
  std::pair<int, long> load(const std::filesystem::path& path) {
    torch::serialize::InputArchive ar;
    ar.load_from(path.string());
    c10::IValue fp;
    ar.read("fingerprint", fp);
    if (fp.toStringRef() != fingerprint(cfg_)) {
      throw ConfigError("checkpoint " + path.string() + " was written with a different configuration");
    }
    for (auto& [name, net] : networks()) {
      torch::serialize::InputArchive sub;
      ar.read(name, sub);
      (*net)->load(sub);
    }
    for (auto& [name, opt] : optimizers()) {
      torch::serialize::InputArchive sub;
      ar.read("optim_" + name, sub);
      opt->load(sub);
    }
    c10::IValue rng_state;
    ar.read("data_rng", rng_state);
    std::istringstream(rng_state.toStringRef()) >> rng_;
    torch::Tensor torch_rng, epoch, step;
    ar.read("torch_rng", torch_rng);
    auto generator = at::detail::getDefaultCPUGenerator();
    generator.set_state(torch_rng);
    ar.read("epoch", epoch);
    ar.read("step", step);
    return {static_cast<int>(epoch.item<int64_t>()), static_cast<long>(step.item<int64_t>())};
  }

 protected:
  torch::Tensor masks(int64_t batch) {
    const auto& p = cfg_.pipeline;
    return sample_masks(batch, static_cast<std::size_t>(p.n_freq()), static_cast<std::size_t>(p.component_width),
                        static_cast<std::size_t>(cfg_.train.fif_max_band), rng_);
  }

  RunConfig cfg_;
  std::mt19937_64 rng_;
  CropSampler sampler_;
};

// Cycle-consistent pair of generators with FIF-masked inputs, used by the
// attention family and the 2-1-2D family. Second-adversarial discriminators
// judge cycled outputs against real samples of their own domain.
class CycleTrainer : public Trainer {
 public:
  explicit CycleTrainer(const RunConfig& cfg) : Trainer(cfg) {
    const auto& m = cfg.model;
    if (!family_uses_fif(m.family)) throw ConfigError("cycle trainer needs speech_attention or mask_cyclegan");
    use_adv2_ = m.family == "speech_attention" || m.second_adversarial;
    g_ab_ = build_generator(m, cfg.pipeline);
    g_ba_ = build_generator(m, cfg.pipeline);
    d_a_ = build_discriminator(m);
    d_b_ = build_discriminator(m);
    if (use_adv2_) {
      d2_a_ = build_discriminator(m);
      d2_b_ = build_discriminator(m);
    }
    opt_g_ = make_adam(parameters_of({&g_ab_, &g_ba_}), cfg.train.lr_g, cfg.train);
    opt_d_ = make_adam(use_adv2_ ? parameters_of({&d_a_, &d_b_, &d2_a_, &d2_b_}) : parameters_of({&d_a_, &d_b_}),
                       cfg.train.lr_d, cfg.train);
  }

  bool uses_second_adversarial() const { return use_adv2_; }

  std::vector<std::string> loss_names() const override {
    return {"g_total", "adv", "adv2", "cycle", "identity", "d_total"};
  }

  std::vector<std::pair<std::string, Net*>> networks() override {
    std::vector<std::pair<std::string, Net*>> n{
        {"generator", &g_ab_}, {"generator_ba", &g_ba_}, {"disc_a", &d_a_}, {"disc_b", &d_b_}};
    if (use_adv2_) {
      n.emplace_back("disc2_a", &d2_a_);
      n.emplace_back("disc2_b", &d2_b_);
    }
    return n;
  }

  std::vector<std::pair<std::string, torch::optim::Optimizer*>> optimizers() override {
    return {{"g", opt_g_.get()}, {"d", opt_d_.get()}};
  }

  std::vector<double> step(const TrainingData& data, long global_step) override {
    const auto& w = cfg_.losses;
    const int batch = cfg_.train.batch_size;
    const auto a = sampler_.draw(data.clean, batch, rng_);
    const auto b = sampler_.draw(data.noisy, batch, rng_);
    const auto mask_a = masks(batch);
    const auto mask_b = masks(batch);
    const auto ones = torch::ones_like(a);
    auto in = [](const torch::Tensor& x, const torch::Tensor& m) { return torch::cat({x * m, m}, 1); };

    opt_g_->zero_grad();
    const auto fake_b = g_ab_(in(a, mask_a));
    const auto cycle_a = g_ba_(in(fake_b, ones));
    const auto fake_a = g_ba_(in(b, mask_b));
    const auto cycle_b = g_ab_(in(fake_a, ones));

    const auto adv = adversarial_loss({}, d_b_(fake_b), Side::generator) +
                     adversarial_loss({}, d_a_(fake_a), Side::generator);
    auto adv2 = torch::zeros({});
    if (use_adv2_) {
      adv2 = second_adversarial_loss(a, cycle_a, d2_a_, Side::generator) +
             second_adversarial_loss(b, cycle_b, d2_b_, Side::generator);
    }
    const auto cyc = cycle_loss(a, cycle_a) + cycle_loss(b, cycle_b);
    auto idt = torch::zeros({});
    const bool identity_on = global_step < w.identity_steps && w.identity > 0;
    if (identity_on) idt = identity_loss(b, g_ab_(in(b, ones))) + identity_loss(a, g_ba_(in(a, ones)));
    const auto g_total = w.adv * adv + w.adv2 * adv2 + w.cycle * cyc + w.identity * idt;
    g_total.backward();
    opt_g_->step();

    opt_d_->zero_grad();
    auto d_total = w.adv * (adversarial_loss(d_a_(a), d_a_(fake_a.detach()), Side::discriminator) +
                            adversarial_loss(d_b_(b), d_b_(fake_b.detach()), Side::discriminator));
    if (use_adv2_) {
      d_total = d_total + w.adv2 * (second_adversarial_loss(a, cycle_a, d2_a_, Side::discriminator) +
                                    second_adversarial_loss(b, cycle_b, d2_b_, Side::discriminator));
    }
    d_total.backward();
    opt_d_->step();

    return {g_total.item<double>(), adv.item<double>(), adv2.item<double>(),
            cyc.item<double>(),     idt.item<double>(), d_total.item<double>()};
  }

 private:
  bool use_adv2_ = true;
  Net g_ab_, g_ba_, d_a_, d_b_, d2_a_, d2_b_;
  std::unique_ptr<torch::optim::Adam> opt_g_, opt_d_;
};

// Single generator trained with an adversarial term and a contrastive patch
// loss between input and output; there is no reverse generator and no cycle.
class ContrastiveTrainer : public Trainer {
 public:
  explicit ContrastiveTrainer(const RunConfig& cfg) : Trainer(cfg) {
    if (cfg.model.family != "simugan") throw ConfigError("contrastive trainer needs the simugan family");
    g_ = build_generator(cfg.model, cfg.pipeline);
    d_ = build_discriminator(cfg.model);
    auto impl = g_.as<ResnetGeneratorImpl>();
    f_ = wrap(PatchProjector(impl->tap_channels(), cfg.model.nce_dim));
    opt_g_ = make_adam(parameters_of({&g_, &f_}), cfg.train.lr_g, cfg.train);
    opt_d_ = make_adam(parameters_of({&d_}), cfg.train.lr_d, cfg.train);
  }

  std::vector<std::string> loss_names() const override { return {"g_total", "adv", "nce", "d_total"}; }

  std::vector<std::pair<std::string, Net*>> networks() override {
    return {{"generator", &g_}, {"disc", &d_}, {"projector", &f_}};
  }

  std::vector<std::pair<std::string, torch::optim::Optimizer*>> optimizers() override {
    return {{"g", opt_g_.get()}, {"d", opt_d_.get()}};
  }

  // Mean PatchNCE over taps and batch items; keys come from `source`, queries
  // from `output`, at the same sampled locations.
  torch::Tensor nce(const torch::Tensor& source, const torch::Tensor& output) {
    auto gen = g_.as<ResnetGeneratorImpl>();
    auto proj = f_.as<PatchProjectorImpl>();
    const auto feat_k = gen->taps(source);
    const auto feat_q = gen->taps(output);
    const auto locs = sample_locations(feat_k, cfg_.model.nce_patches);
    const auto k = proj->forward(feat_k, locs);
    const auto q = proj->forward(feat_q, locs);
    auto total = torch::zeros({});
    for (std::size_t l = 0; l < k.size(); ++l) {
      for (int64_t i = 0; i < k[l].size(0); ++i) {
        total = total + patchnce_loss(q[l][i], k[l][i].detach(), cfg_.losses.nce_temperature);
      }
    }
    return total / static_cast<double>(k.size() * static_cast<std::size_t>(k.front().size(0)));
  }

  std::vector<double> step(const TrainingData& data, long) override {
    const auto& w = cfg_.losses;
    const int batch = cfg_.train.batch_size;
    const auto a = sampler_.draw(data.clean, batch, rng_);
    const auto b = sampler_.draw(data.noisy, batch, rng_);

    opt_g_->zero_grad();
    const auto fake_b = g_(a);
    const auto adv = adversarial_loss({}, d_(fake_b), Side::generator);
    auto nce_term = nce(a, fake_b);
    if (cfg_.model.identity_nce) nce_term = 0.5 * (nce_term + nce(b, g_(b)));
    const auto g_total = w.adv * adv + w.nce * nce_term;
    g_total.backward();
    opt_g_->step();

    opt_d_->zero_grad();
    const auto d_total = w.adv * adversarial_loss(d_(b), d_(fake_b.detach()), Side::discriminator);
    d_total.backward();
    opt_d_->step();

    return {g_total.item<double>(), adv.item<double>(), nce_term.item<double>(), d_total.item<double>()};
  }

 private:
  Net g_, d_, f_;
  std::unique_ptr<torch::optim::Adam> opt_g_, opt_d_;
};

// Supervised translation of aligned pairs: conditional adversarial term plus
// a weighted L1 distance to the true noisy component.
class PairedTrainer : public Trainer {
 public:
  explicit PairedTrainer(const RunConfig& cfg) : Trainer(cfg) {
    if (cfg.model.family != "speech2speech") throw ConfigError("paired trainer needs the speech2speech family");
    g_ = build_generator(cfg.model, cfg.pipeline);
    d_ = build_discriminator(cfg.model);
    opt_g_ = make_adam(parameters_of({&g_}), cfg.train.lr_g, cfg.train);
    opt_d_ = make_adam(parameters_of({&d_}), cfg.train.lr_d, cfg.train);
  }

  std::vector<std::string> loss_names() const override { return {"g_total", "adv", "l1", "d_total"}; }

  std::vector<std::pair<std::string, Net*>> networks() override { return {{"generator", &g_}, {"disc", &d_}}; }

  std::vector<std::pair<std::string, torch::optim::Optimizer*>> optimizers() override {
    return {{"g", opt_g_.get()}, {"d", opt_d_.get()}};
  }

  std::vector<double> step(const TrainingData& data, long) override {
    if (!data.parallel) throw DataError("speech2speech needs parallel (aligned) training pairs");
    const auto& w = cfg_.losses;
    auto [a, b] = sampler_.draw_pair(data.clean, data.noisy, cfg_.train.batch_size, rng_);

    opt_g_->zero_grad();
    const auto fake_b = g_(a);
    const auto adv = adversarial_loss({}, d_(torch::cat({a, fake_b}, 1)), Side::generator);
    const auto l1 = l1_supervised_loss(fake_b, b);
    const auto g_total = w.adv * adv + w.l1 * l1;
    g_total.backward();
    opt_g_->step();

    opt_d_->zero_grad();
    const auto d_total = w.adv * adversarial_loss(d_(torch::cat({a, b}, 1)),
                                                  d_(torch::cat({a, fake_b.detach()}, 1)), Side::discriminator);
    d_total.backward();
    opt_d_->step();

    return {g_total.item<double>(), adv.item<double>(), l1.item<double>(), d_total.item<double>()};
  }

 private:
  Net g_, d_;
  std::unique_ptr<torch::optim::Adam> opt_g_, opt_d_;
};

inline std::unique_ptr<Trainer> make_trainer(const RunConfig& cfg) {
  check_family(cfg.model.family);
  if (family_uses_fif(cfg.model.family)) return std::make_unique<CycleTrainer>(cfg);
  if (cfg.model.family == "simugan") return std::make_unique<ContrastiveTrainer>(cfg);
  return std::make_unique<PairedTrainer>(cfg);
}

}  // namespace noisegan::gan
