#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "noisegan/config.hpp"
#include "noisegan/core/error.hpp"

namespace noisegan::gan {

namespace nn = torch::nn;

inline nn::Conv2dOptions conv(int in, int out, int k, int stride = 1, int pad = 0) {
  return nn::Conv2dOptions(in, out, k).stride(stride).padding(pad);
}

inline nn::InstanceNorm2d inorm(int ch) { return nn::InstanceNorm2d(nn::InstanceNorm2dOptions(ch).affine(true)); }

// N(0, 0.02) weights and zero biases on every conv/linear, unit-centred norm scales.
inline void init_weights(nn::Module& m) {
  torch::NoGradGuard guard;
  for (auto& mod : m.modules(/*include_self=*/true)) {
    const std::string name = mod->name();
    const bool weighted = name.find("Conv") != std::string::npos || name.find("Linear") != std::string::npos;
    const bool norm = name.find("InstanceNorm") != std::string::npos || name.find("BatchNorm") != std::string::npos;
    for (auto& p : mod->named_parameters(/*recurse=*/false)) {
      if (p.key() == "weight") {
        if (weighted) p.value().normal_(0.0, 0.02);
        if (norm) p.value().normal_(1.0, 0.02);
      } else if (p.key() == "bias") {
        p.value().zero_();
      }
    }
  }
}

struct ResnetBlockImpl : nn::Module {
  nn::Sequential body;

  explicit ResnetBlockImpl(int ch) {
    body = register_module("body", nn::Sequential(nn::ReflectionPad2d(1), nn::Conv2d(conv(ch, ch, 3)), inorm(ch),
                                                  nn::ReLU(true), nn::ReflectionPad2d(1), nn::Conv2d(conv(ch, ch, 3)),
                                                  inorm(ch)));
  }

  torch::Tensor forward(const torch::Tensor& x) { return x + body->forward(x); }
};
TORCH_MODULE(ResnetBlock);

// c7s1-ch, two stride-2 downsamplings, residual trunk. Shared by the
// attention and contrastive generators.
struct ResnetEncoderImpl : nn::Module {
  nn::Sequential stem{nullptr}, down1{nullptr}, down2{nullptr};
  std::vector<ResnetBlock> blocks;

  ResnetEncoderImpl(int in_ch, int ch, int n_blocks) {
    stem = register_module("stem", nn::Sequential(nn::ReflectionPad2d(3), nn::Conv2d(conv(in_ch, ch, 7)), inorm(ch),
                                                  nn::ReLU(true)));
    down1 = register_module("down1", nn::Sequential(nn::Conv2d(conv(ch, 2 * ch, 3, 2, 1)), inorm(2 * ch),
                                                    nn::ReLU(true)));
    down2 = register_module("down2", nn::Sequential(nn::Conv2d(conv(2 * ch, 4 * ch, 3, 2, 1)), inorm(4 * ch),
                                                    nn::ReLU(true)));
    for (int i = 0; i < n_blocks; ++i) {
      blocks.push_back(register_module("block" + std::to_string(i), ResnetBlock(4 * ch)));
    }
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto h = down2->forward(down1->forward(stem->forward(x)));
    for (auto& b : blocks) h = b->forward(h);
    return h;
  }

  // Intermediate maps at four depths: stem, each downsampling, middle of the trunk.
  std::vector<torch::Tensor> taps(const torch::Tensor& x) {
    std::vector<torch::Tensor> out;
    auto h = stem->forward(x);
    out.push_back(h);
    h = down1->forward(h);
    out.push_back(h);
    h = down2->forward(h);
    out.push_back(h);
    const std::size_t mid = blocks.size() / 2;
    for (std::size_t i = 0; i <= mid && i < blocks.size(); ++i) h = blocks[i]->forward(h);
    out.push_back(h);
    return out;
  }

  std::vector<int> tap_channels(int ch) const { return {ch, 2 * ch, 4 * ch, 4 * ch}; }
};
TORCH_MODULE(ResnetEncoder);

inline nn::Sequential upsampler(int ch) {
  return nn::Sequential(
      nn::ConvTranspose2d(nn::ConvTranspose2dOptions(4 * ch, 2 * ch, 3).stride(2).padding(1).output_padding(1)),
      inorm(2 * ch), nn::ReLU(true),
      nn::ConvTranspose2d(nn::ConvTranspose2dOptions(2 * ch, ch, 3).stride(2).padding(1).output_padding(1)), inorm(ch),
      nn::ReLU(true));
}

struct AttentionOutput {
  torch::Tensor image;
  torch::Tensor content;    // B x n x H x W, tanh
  torch::Tensor attention;  // B x (n + 1) x H x W, softmax over dim 1; last slice is the background
};

// Attention-guided generator: a shared encoder feeds a content-mask branch
// and an attention-mask branch. The output mixes n content masks and the
// input itself, weighted by the per-pixel softmax attention.
struct AttentionGeneratorImpl : nn::Module {
  ResnetEncoder encoder{nullptr};
  nn::Sequential content_up{nullptr}, attention_up{nullptr};
  nn::Conv2d content_head{nullptr}, attention_head{nullptr};
  int n_masks;

  AttentionGeneratorImpl(int in_ch, int ch, int n_blocks, int masks) : n_masks(masks) {
    encoder = register_module("encoder", ResnetEncoder(in_ch, ch, n_blocks));
    content_up = register_module("content_up", upsampler(ch));
    attention_up = register_module("attention_up", upsampler(ch));
    content_head = register_module("content_head", nn::Conv2d(conv(ch, masks, 7, 1, 3)));
    attention_head = register_module("attention_head", nn::Conv2d(conv(ch, masks + 1, 1)));
  }

  AttentionOutput forward_masks(const torch::Tensor& x) {
    const auto h = encoder->forward(x);
    const auto content = torch::tanh(content_head->forward(content_up->forward(h)));
    const auto attention = torch::softmax(attention_head->forward(attention_up->forward(h)), 1);
    const auto source = x.narrow(1, 0, 1);
    const auto fg = (content * attention.narrow(1, 0, n_masks)).sum(1, true);
    const auto bg = source * attention.narrow(1, n_masks, 1);
    return {fg + bg, content, attention};
  }

  torch::Tensor forward(const torch::Tensor& x) { return forward_masks(x).image; }
};
TORCH_MODULE(AttentionGenerator);

// 2-1-2D generator with gated linear units: 2D downsampling, a 1D residual
// trunk over (channels x frequency) features, 2D pixel-shuffle upsampling.
struct GluConv2dImpl : nn::Module {
  nn::Conv2d conv2{nullptr};
  nn::InstanceNorm2d norm{nullptr};
  bool use_norm;

  // kernel kh x kw, "same" padding
  GluConv2dImpl(int in, int out, int kh, int kw, int stride, bool normed = true) : use_norm(normed) {
    conv2 = register_module(
        "conv", nn::Conv2d(nn::Conv2dOptions(in, 2 * out, {kh, kw}).stride(stride).padding({kh / 2, kw / 2})));
    if (use_norm) norm = register_module("norm", inorm(2 * out));
  }

  torch::Tensor forward(torch::Tensor x) {
    x = conv2->forward(x);
    if (use_norm) x = norm->forward(x);
    return torch::glu(x, 1);
  }
};
TORCH_MODULE(GluConv2d);

struct Residual1dImpl : nn::Module {
  nn::Conv1d c1{nullptr}, c2{nullptr};
  nn::InstanceNorm1d n1{nullptr}, n2{nullptr};

  explicit Residual1dImpl(int ch) {
    c1 = register_module("c1", nn::Conv1d(nn::Conv1dOptions(ch, 2 * ch, 3).padding(1)));
    n1 = register_module("n1", nn::InstanceNorm1d(nn::InstanceNorm1dOptions(2 * ch).affine(true)));
    c2 = register_module("c2", nn::Conv1d(nn::Conv1dOptions(ch, ch, 3).padding(1)));
    n2 = register_module("n2", nn::InstanceNorm1d(nn::InstanceNorm1dOptions(ch).affine(true)));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto h = torch::glu(n1->forward(c1->forward(x)), 1);
    return x + n2->forward(c2->forward(h));
  }
};
TORCH_MODULE(Residual1d);

struct MaskCycleGeneratorImpl : nn::Module {
  GluConv2d stem{nullptr}, down1{nullptr}, down2{nullptr};
  nn::Conv1d to1d{nullptr}, to2d{nullptr};
  nn::InstanceNorm1d n_to1d{nullptr}, n_to2d{nullptr};
  std::vector<Residual1d> trunk;
  nn::Conv2d up1{nullptr}, up2{nullptr}, head{nullptr};
  nn::InstanceNorm2d n_up1{nullptr}, n_up2{nullptr};
  int ch, n_freq;

  MaskCycleGeneratorImpl(int in_ch, int channels, int freq, int n_blocks) : ch(channels), n_freq(freq) {
    if (freq % 4 != 0) throw ConfigError("mask_cyclegan needs a frequency size divisible by 4");
    stem = register_module("stem", GluConv2d(in_ch, ch, 5, 15, 1, false));
    down1 = register_module("down1", GluConv2d(ch, 2 * ch, 5, 5, 2));
    down2 = register_module("down2", GluConv2d(2 * ch, 2 * ch, 5, 5, 2));
    const int flat = 2 * ch * (freq / 4);
    to1d = register_module("to1d", nn::Conv1d(nn::Conv1dOptions(flat, 2 * ch, 1)));
    n_to1d = register_module("n_to1d", nn::InstanceNorm1d(nn::InstanceNorm1dOptions(2 * ch).affine(true)));
    for (int i = 0; i < n_blocks; ++i) trunk.push_back(register_module("res" + std::to_string(i), Residual1d(2 * ch)));
    to2d = register_module("to2d", nn::Conv1d(nn::Conv1dOptions(2 * ch, flat, 1)));
    n_to2d = register_module("n_to2d", nn::InstanceNorm1d(nn::InstanceNorm1dOptions(flat).affine(true)));
    // each upsampling conv emits 4x channels for the 2x pixel shuffle, doubled again for the GLU gate
    up1 = register_module("up1", nn::Conv2d(conv(2 * ch, 8 * ch, 5, 1, 2)));
    n_up1 = register_module("n_up1", inorm(2 * ch));
    up2 = register_module("up2", nn::Conv2d(conv(ch, 4 * ch, 5, 1, 2)));
    n_up2 = register_module("n_up2", inorm(ch));
    head = register_module("head", nn::Conv2d(nn::Conv2dOptions(ch / 2, 1, {5, 15}).padding({2, 7})));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto h = down2->forward(down1->forward(stem->forward(x)));
    const auto sizes = h.sizes();
    auto f = h.reshape({sizes[0], sizes[1] * sizes[2], sizes[3]});
    f = n_to1d->forward(to1d->forward(f));
    for (auto& r : trunk) f = r->forward(f);
    f = n_to2d->forward(to2d->forward(f));
    h = f.reshape(sizes);
    h = torch::glu(n_up1->forward(torch::pixel_shuffle(up1->forward(h), 2)), 1);
    h = torch::glu(n_up2->forward(torch::pixel_shuffle(up2->forward(h), 2)), 1);
    return head->forward(h);
  }
};
TORCH_MODULE(MaskCycleGenerator);

// Encoder-decoder generator for the contrastive family; its encoder exposes
// the feature taps used by the patch loss.
struct ResnetGeneratorImpl : nn::Module {
  ResnetEncoder encoder{nullptr};
  nn::Sequential up{nullptr}, head{nullptr};
  int ch;

  ResnetGeneratorImpl(int in_ch, int channels, int n_blocks) : ch(channels) {
    encoder = register_module("encoder", ResnetEncoder(in_ch, ch, n_blocks));
    up = register_module("up", upsampler(ch));
    head = register_module("head", nn::Sequential(nn::ReflectionPad2d(3), nn::Conv2d(conv(ch, 1, 7)), nn::Tanh()));
  }

  torch::Tensor forward(const torch::Tensor& x) { return head->forward(up->forward(encoder->forward(x))); }
  std::vector<torch::Tensor> taps(const torch::Tensor& x) { return encoder->taps(x); }
  std::vector<int> tap_channels() const { return encoder->tap_channels(ch); }
};
TORCH_MODULE(ResnetGenerator);

// U-Net with skip connections between mirrored encoder and decoder levels.
struct UnetGeneratorImpl : nn::Module {
  std::vector<nn::Sequential> downs, ups;
  nn::ConvTranspose2d final_up{nullptr};
  int depth;

  UnetGeneratorImpl(int in_ch, int ch, int levels, bool dropout) : depth(levels) {
    if (levels < 2) throw ConfigError("unet_depth must be >= 2");
    auto width = [ch](int level) { return ch * std::min(1 << level, 8); };
    for (int i = 0; i < levels; ++i) {
      const int in = i == 0 ? in_ch : width(i - 1);
      nn::Sequential s;
      if (i > 0) s->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2).inplace(false)));
      s->push_back(nn::Conv2d(conv(in, width(i), 4, 2, 1)));
      if (i > 0 && i < levels - 1) s->push_back(inorm(width(i)));
      downs.push_back(register_module("down" + std::to_string(i), s));
    }
    // decoder levels from the bottom up; level i mirrors down i
    for (int i = levels - 1; i >= 1; --i) {
      const int in = i == levels - 1 ? width(i) : 2 * width(i);
      nn::Sequential s(nn::ReLU(false), nn::ConvTranspose2d(nn::ConvTranspose2dOptions(in, width(i - 1), 4)
                                                                 .stride(2)
                                                                 .padding(1)),
                       inorm(width(i - 1)));
      if (dropout && i >= levels - 4 && i <= levels - 2) s->push_back(nn::Dropout(0.5));
      ups.push_back(register_module("up" + std::to_string(i), s));
    }
    final_up = register_module("final_up", nn::ConvTranspose2d(nn::ConvTranspose2dOptions(2 * width(0), 1, 4)
                                                                   .stride(2)
                                                                   .padding(1)));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    const int64_t unit = int64_t{1} << depth;
    if (x.size(2) % unit != 0 || x.size(3) % unit != 0) {
      throw ShapeError("U-Net input " + std::to_string(x.size(2)) + "x" + std::to_string(x.size(3)) +
                       " is not divisible by 2^" + std::to_string(depth));
    }
    std::vector<torch::Tensor> skips;
    auto h = x;
    for (auto& d : downs) {
      h = d->forward(h);
      skips.push_back(h);
    }
    for (std::size_t k = 0; k < ups.size(); ++k) {
      h = ups[k]->forward(h);
      h = torch::cat({h, skips[skips.size() - 2 - k]}, 1);
    }
    return torch::tanh(final_up->forward(torch::relu(h)));
  }
};
TORCH_MODULE(UnetGenerator);

// Convolutional patch discriminator; three strided layers give a 70x70
// receptive field.
struct PatchDiscriminatorImpl : nn::Module {
  nn::Sequential body{nullptr};

  PatchDiscriminatorImpl(int in_ch, int ch, int n_layers) {
    nn::Sequential s(nn::Conv2d(conv(in_ch, ch, 4, 2, 1)),
                     nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2).inplace(true)));
    int mult = 1;
    for (int i = 1; i <= n_layers; ++i) {
      const int prev = mult;
      mult = std::min(1 << i, 8);
      const int stride = i == n_layers ? 1 : 2;
      s->push_back(nn::Conv2d(conv(ch * prev, ch * mult, 4, stride, 1)));
      s->push_back(inorm(ch * mult));
      s->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2).inplace(true)));
    }
    s->push_back(nn::Conv2d(conv(ch * mult, 1, 4, 1, 1)));
    body = register_module("body", s);
  }

  torch::Tensor forward(const torch::Tensor& x) { return body->forward(x); }
};
TORCH_MODULE(PatchDiscriminator);

// Discriminator of the 2-1-2D family: gated 2D convolutions down to a patch map.
struct GluDiscriminatorImpl : nn::Module {
  GluConv2d stem{nullptr};
  std::vector<GluConv2d> downs;
  nn::Conv2d head{nullptr};

  GluDiscriminatorImpl(int in_ch, int ch, int n_layers) {
    stem = register_module("stem", GluConv2d(in_ch, ch, 3, 3, 1, false));
    int c = ch;
    for (int i = 0; i < n_layers; ++i) {
      const int next = std::min(c * 2, ch * 8);
      downs.push_back(register_module("down" + std::to_string(i), GluConv2d(c, next, 3, 3, 2)));
      c = next;
    }
    head = register_module("head", nn::Conv2d(nn::Conv2dOptions(c, 1, {1, 3}).padding({0, 1})));
  }

  torch::Tensor forward(const torch::Tensor& x) {
    auto h = stem->forward(x);
    for (auto& d : downs) h = d->forward(h);
    return head->forward(h);
  }
};
TORCH_MODULE(GluDiscriminator);

// Per-tap two-layer MLP projecting sampled feature vectors to unit-norm embeddings.
struct PatchProjectorImpl : nn::Module {
  std::vector<nn::Sequential> heads;

  PatchProjectorImpl(const std::vector<int>& channels, int dim) {
    for (std::size_t i = 0; i < channels.size(); ++i) {
      heads.push_back(register_module("mlp" + std::to_string(i),
                                      nn::Sequential(nn::Linear(channels[i], dim), nn::ReLU(true),
                                                     nn::Linear(dim, dim))));
    }
  }

  // feats[l]: B x C x H x W. locations[l]: flat indices into H*W. Returns B x P x dim per tap.
  std::vector<torch::Tensor> forward(const std::vector<torch::Tensor>& feats,
                                     const std::vector<torch::Tensor>& locations) {
    if (feats.size() != heads.size() || locations.size() != heads.size()) {
      throw ShapeError("expected " + std::to_string(heads.size()) + " feature taps");
    }
    std::vector<torch::Tensor> out;
    for (std::size_t l = 0; l < feats.size(); ++l) {
      const auto& f = feats[l];
      const int64_t hw = f.size(2) * f.size(3);
      const auto& loc = locations[l];
      if (loc.numel() > 0 && (loc.min().item<int64_t>() < 0 || loc.max().item<int64_t>() >= hw)) {
        throw ShapeError("patch location outside a " + std::to_string(f.size(2)) + "x" + std::to_string(f.size(3)) +
                         " feature map");
      }
      const auto flat = f.flatten(2).permute({0, 2, 1});  // B x HW x C
      const auto picked = flat.index_select(1, loc);      // B x P x C
      out.push_back(torch::nn::functional::normalize(heads[l]->forward(picked),
                                                     torch::nn::functional::NormalizeFuncOptions().dim(2)));
    }
    return out;
  }
};
TORCH_MODULE(PatchProjector);

// Random patch locations for each tap, shared by the query and key images.
inline std::vector<torch::Tensor> sample_locations(const std::vector<torch::Tensor>& feats, int patches) {
  std::vector<torch::Tensor> locs;
  for (const auto& f : feats) {
    const int64_t hw = f.size(2) * f.size(3);
    locs.push_back(torch::randperm(hw, torch::kLong).narrow(0, 0, std::min<int64_t>(patches, hw)));
  }
  return locs;
}

inline std::vector<torch::Tensor> extract_patch_features(PatchProjector& projector, ResnetGenerator& generator,
                                                         const torch::Tensor& image,
                                                         const std::vector<torch::Tensor>& locations) {
  return projector->forward(generator->taps(image), locations);
}

// Channels the generator of a family consumes: FIF families add the mask.
inline int generator_in_channels(const std::string& family) { return family_uses_fif(family) ? 2 : 1; }

// Type-erased network: the concrete module plus its forward.
struct Net {
  std::shared_ptr<nn::Module> module;
  std::function<torch::Tensor(const torch::Tensor&)> fn;

  torch::Tensor operator()(const torch::Tensor& x) const { return fn(x); }
  nn::Module& operator*() const { return *module; }
  nn::Module* operator->() const { return module.get(); }

  template <typename Impl>
  std::shared_ptr<Impl> as() const {
    return std::dynamic_pointer_cast<Impl>(module);
  }
};

template <typename Holder>
Net wrap(Holder h) {
  auto impl = h.ptr();
  init_weights(*impl);
  Net n{impl, {}};
  if constexpr (requires(const torch::Tensor& x) { impl->forward(x); }) {
    n.fn = [impl](const torch::Tensor& x) { return impl->forward(x); };
  }
  return n;
}

inline Net build_generator(const ModelConfig& m, const PipelineConfig& p) {
  check_family(m.family);
  const int ch = m.generator_channels();
  const int in = generator_in_channels(m.family);
  if (m.family == "speech_attention") return wrap(AttentionGenerator(in, ch, m.residual_blocks, m.attention_masks));
  if (m.family == "mask_cyclegan") return wrap(MaskCycleGenerator(in, ch, p.n_freq(), m.mcg_residual_blocks));
  if (m.family == "simugan") return wrap(ResnetGenerator(in, ch, m.residual_blocks));
  return wrap(UnetGenerator(in, ch, m.unet_depth, m.unet_dropout));
}

// Primary and second-adversarial discriminators share this builder, so they
// have identical architectures and differ only in their random init.
inline Net build_discriminator(const ModelConfig& m) {
  check_family(m.family);
  const int in = m.family == "speech2speech" ? 2 : 1;
  if (m.family == "mask_cyclegan") return wrap(GluDiscriminator(in, m.disc_channels, m.disc_layers));
  return wrap(PatchDiscriminator(in, m.disc_channels, m.disc_layers));
}

}  // namespace noisegan::gan
