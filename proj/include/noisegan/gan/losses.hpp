#pragma once

#include <string>

#include <torch/torch.h>

#include "noisegan/core/error.hpp"

namespace noisegan::gan {

enum class Side { generator, discriminator };

namespace detail {

inline void check_finite(const torch::Tensor& t, const char* what) {
  if (t.defined() && torch::isnan(t).any().item<bool>()) throw NumericalError(std::string("NaN in ") + what);
}

inline void check_same_shape(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  if (a.sizes() != b.sizes()) {
    throw ShapeError(std::string(what) + ": shape " + c10::str(a.sizes()) + " vs " + c10::str(b.sizes()));
  }
}

}  // namespace detail

// Least-squares GAN objective.
//   discriminator: mean((D(real) - 1)^2) + mean(D(fake)^2)
//   generator:     mean((D(fake) - 1)^2); disc_real is unused
inline torch::Tensor adversarial_loss(const torch::Tensor& disc_real, const torch::Tensor& disc_fake, Side side) {
  detail::check_finite(disc_fake, "discriminator output (fake)");
  if (side == Side::generator) return (disc_fake - 1).pow(2).mean();
  detail::check_finite(disc_real, "discriminator output (real)");
  return (disc_real - 1).pow(2).mean() + disc_fake.pow(2).mean();
}

// Adversarial term on cycled outputs judged by a dedicated discriminator.
// The cycled sample is detached on the discriminator side.
template <typename D>
torch::Tensor second_adversarial_loss(const torch::Tensor& real, const torch::Tensor& cycled, D&& disc, Side side) {
  if (side == Side::generator) return adversarial_loss({}, disc(cycled), side);
  return adversarial_loss(disc(real), disc(cycled.detach()), side);
}

inline torch::Tensor mean_abs(const torch::Tensor& a, const torch::Tensor& b, const char* what) {
  detail::check_same_shape(a, b, what);
  return (a - b).abs().mean();
}

inline torch::Tensor cycle_loss(const torch::Tensor& real, const torch::Tensor& cycled) {
  return mean_abs(real, cycled, "cycle loss");
}

inline torch::Tensor identity_loss(const torch::Tensor& real, const torch::Tensor& mapped) {
  return mean_abs(real, mapped, "identity loss");
}

inline torch::Tensor l1_supervised_loss(const torch::Tensor& generated, const torch::Tensor& target) {
  return mean_abs(generated, target, "L1 loss");
}

// Contrastive patch loss for N unit-norm queries and keys (N x dim): the key
// with the query's index is the positive, the other N - 1 are negatives.
inline torch::Tensor patchnce_loss(const torch::Tensor& query, const torch::Tensor& key, double temperature) {
  detail::check_same_shape(query, key, "PatchNCE");
  if (query.dim() != 2) throw ShapeError("PatchNCE expects N x dim features");
  if (query.size(0) < 2) throw ConfigError("PatchNCE needs at least 2 patches");
  if (!(temperature > 0)) throw ConfigError("PatchNCE temperature must be > 0");
  const auto logits = query.matmul(key.t()) / temperature;
  const auto target = torch::arange(query.size(0), torch::TensorOptions().dtype(torch::kLong).device(query.device()));
  return torch::nn::functional::cross_entropy(logits, target);
}

}  // namespace noisegan::gan
