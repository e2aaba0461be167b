// Copyright 2026 The Softbit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "softbit/trainer.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "softbit/entropy_codec.h"
#include "softbit/metrics.h"
#include "softbit/status.h"

namespace softbit {

namespace {

constexpr std::array<double, 3> kPlaneWeights = {4.0 / 6.0, 1.0 / 6.0,
                                                 1.0 / 6.0};
constexpr char kModelMagic[4] = {'S', 'B', 'M', '1'};

using Block = std::array<double, kBlockValues>;

void GatherBlock(const ImagePlanes& img, size_t bx, size_t by, Block& v) {
  for (size_t p = 0; p < 3; ++p) {
    for (size_t dy = 0; dy < kBlockSize; ++dy) {
      for (size_t dx = 0; dx < kBlockSize; ++dx) {
        v[(p * kBlockSize + dy) * kBlockSize + dx] =
            img.planes[p].At(bx * kBlockSize + dx, by * kBlockSize + dy);
      }
    }
  }
}

void ScatterBlock(const Block& v, size_t bx, size_t by, ImagePlanes& img) {
  for (size_t p = 0; p < 3; ++p) {
    for (size_t dy = 0; dy < kBlockSize; ++dy) {
      for (size_t dx = 0; dx < kBlockSize; ++dx) {
        img.planes[p].At(bx * kBlockSize + dx, by * kBlockSize + dy) =
            v[(p * kBlockSize + dy) * kBlockSize + dx];
      }
    }
  }
}

double Logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

TensorShape GridShape(const ImagePlanes& patch, size_t channels) {
  SOFTBIT_CHECK(patch.width % kBlockSize == 0 && patch.height % kBlockSize == 0,
                "patch size must be a multiple of 8");
  return {patch.width / kBlockSize, patch.height / kBlockSize, channels};
}

// Encoder forward pass keeping df/dz for the backward pass.
FeatureTensor EncodeWithDerivative(const ImagePlanes& patch,
                                   const ToyModelParams& params,
                                   std::vector<double>* dfdz) {
  const size_t channels = params.channels;
  FeatureTensor f(GridShape(patch, channels));
  if (dfdz) dfdz->assign(f.samples.size(), 0.0);
  const std::span<const double> w = params.enc_weights();
  const std::span<const double> bias = params.enc_bias();
  Block v;
  for (size_t by = 0; by < f.shape.height; ++by) {
    for (size_t bx = 0; bx < f.shape.width; ++bx) {
      GatherBlock(patch, bx, by, v);
      for (size_t c = 0; c < channels; ++c) {
        double z = bias[c];
        const double* row = &w[c * kBlockValues];
        for (size_t j = 0; j < kBlockValues; ++j) z += row[j] * v[j];
        const double s = Logistic(z);
        const size_t idx = f.shape.Index(c, bx, by);
        f.samples[idx] = ClampFeature(s);
        if (dfdz) {
          (*dfdz)[idx] = (s > kFeatureMax || s <= 0.0) ? 0.0 : s * (1.0 - s);
        }
      }
    }
  }
  return f;
}

uint64_t Mix(uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void PutF64(std::vector<uint8_t>& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

double GetF64(std::span<const uint8_t> b, size_t pos) {
  uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | b[pos + i];
  double v;
  std::memcpy(&v, &bits, sizeof(v));
  return v;
}

}  // namespace

ToyModelParams::ToyModelParams(size_t c)
    : channels(c), values(2 * c * kBlockValues + c + kBlockValues, 0.0) {}

ToyModelParams ToyModelParams::Init(size_t c, uint64_t seed) {
  SOFTBIT_CHECK(c >= 1 && c <= kMaxChannels, "channel count out of range");
  ToyModelParams p(c);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  for (double& w : p.enc_weights()) w = dist(rng);
  for (double& w : p.dec_weights()) w = dist(rng);
  return p;
}

std::span<double> ToyModelParams::enc_weights() {
  return std::span<double>(values).subspan(0, channels * kBlockValues);
}
std::span<double> ToyModelParams::enc_bias() {
  return std::span<double>(values).subspan(channels * kBlockValues, channels);
}
std::span<double> ToyModelParams::dec_weights() {
  return std::span<double>(values).subspan(channels * kBlockValues + channels,
                                           kBlockValues * channels);
}
std::span<double> ToyModelParams::dec_bias() {
  return std::span<double>(values).subspan(2 * channels * kBlockValues + channels,
                                           kBlockValues);
}
std::span<const double> ToyModelParams::enc_weights() const {
  return const_cast<ToyModelParams*>(this)->enc_weights();
}
std::span<const double> ToyModelParams::enc_bias() const {
  return const_cast<ToyModelParams*>(this)->enc_bias();
}
std::span<const double> ToyModelParams::dec_weights() const {
  return const_cast<ToyModelParams*>(this)->dec_weights();
}
std::span<const double> ToyModelParams::dec_bias() const {
  return const_cast<ToyModelParams*>(this)->dec_bias();
}

void TrainConfig::Validate() const {
  SOFTBIT_CHECK(lambda >= 0.0 && std::isfinite(lambda), "lambda must be >= 0");
  SOFTBIT_CHECK(batch_size >= 1, "batch size must be positive");
  SOFTBIT_CHECK(learning_rate > 0.0, "learning rate must be positive");
  SOFTBIT_CHECK(refit_interval >= 1, "refit interval must be positive");
  SOFTBIT_CHECK(channels >= 1 && channels <= kMaxChannels,
                "channel count out of range");
  SOFTBIT_CHECK(patch_size >= kBlockSize && patch_size % kBlockSize == 0,
                "patch size must be a positive multiple of 8");
  soft().Validate();
}

std::string TrainReport::ToCsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "step,L_D,L_R_bits,objective\n";
  for (const StepRecord& r : steps) {
    out << r.step << ',' << r.distortion << ',' << r.rate_bits << ','
        << r.objective << '\n';
  }
  return out.str();
}

FeatureTensor ToyEncode(const ImagePlanes& patch,
                        const ToyModelParams& params) {
  return EncodeWithDerivative(patch, params, nullptr);
}

ImagePlanes ToyDecode(const FeatureTensor& features,
                      const ToyModelParams& params) {
  const TensorShape& s = features.shape;
  SOFTBIT_CHECK(s.channels == params.channels, "channel count mismatch");
  ImagePlanes out(s.width * kBlockSize, s.height * kBlockSize);
  const std::span<const double> w = params.dec_weights();
  const std::span<const double> bias = params.dec_bias();
  Block v;
  for (size_t by = 0; by < s.height; ++by) {
    for (size_t bx = 0; bx < s.width; ++bx) {
      for (size_t i = 0; i < kBlockValues; ++i) {
        double acc = bias[i];
        for (size_t c = 0; c < s.channels; ++c) {
          acc += w[i * s.channels + c] * features.samples[s.Index(c, bx, by)];
        }
        v[i] = acc;
      }
      ScatterBlock(v, bx, by, out);
    }
  }
  return out;
}

double DistortionLoss(const ImagePlanes& x, const ImagePlanes& x_hat) {
  SOFTBIT_CHECK(x.width == x_hat.width && x.height == x_hat.height,
                "image shapes differ");
  SOFTBIT_CHECK(x.width > 0 && x.height > 0, "empty image");
  const double n = static_cast<double>(x.width * x.height);
  double loss = 0.0;
  for (size_t p = 0; p < 3; ++p) {
    double sse = 0.0;
    const auto& a = x.planes[p].samples;
    const auto& b = x_hat.planes[p].samples;
    for (size_t i = 0; i < a.size(); ++i) sse += (b[i] - a[i]) * (b[i] - a[i]);
    loss += kPlaneWeights[p] * sse / n;
  }
  return loss;
}

ObjectiveTerms EvaluateObjective(const PatchBatch& batch,
                                 const ToyModelParams& params,
                                 const RegressorParams& regressor,
                                 const TrainConfig& cfg,
                                 const ObjectiveOptions& options) {
  SOFTBIT_CHECK(batch.count() > 0, "empty batch");
  SOFTBIT_CHECK(params.channels == cfg.channels, "channel count mismatch");
  if (options.frozen_contexts) {
    SOFTBIT_CHECK(options.frozen_contexts->size() == batch.count(),
                  "one context assignment per patch required");
  }
  const SoftBitConfig soft_cfg = cfg.soft();
  const size_t channels = params.channels;
  const double inv_batch = 1.0 / static_cast<double>(batch.count());

  if (options.grad) options.grad->assign(params.values.size(), 0.0);
  if (options.rate_grad) options.rate_grad->assign(params.values.size(), 0.0);
  if (options.hard_indices) options.hard_indices->clear();

  ObjectiveTerms terms;
  std::vector<double> dfdz;
  for (size_t n = 0; n < batch.count(); ++n) {
    const ImagePlanes& x = batch.patches[n];
    const FeatureTensor f = EncodeWithDerivative(x, params, &dfdz);
    const QuantIndices q = Quantize(f, cfg.quant());
    const SoftBitTensor soft = ComputeSoftBits(f, soft_cfg);
    const FeatureTensor f_soft = SoftDequantize(soft);
    const ImagePlanes x_hat = ToyDecode(f_soft, params);

    std::vector<ContextId> own_contexts;
    const std::vector<ContextId>* contexts;
    if (options.frozen_contexts) {
      contexts = &(*options.frozen_contexts)[n];
    } else {
      own_contexts = AssignContexts(q);
      contexts = &own_contexts;
    }
    const RateLoss rate = ComputeRateLoss(soft, *contexts, regressor);
    const double pixels = static_cast<double>(x.width * x.height);
    const double distortion = DistortionLoss(x, x_hat);

    terms.distortion += distortion * inv_batch;
    terms.rate_bits += rate.total_bits * inv_batch;
    terms.objective +=
        (cfg.lambda * rate.total_bits / pixels + distortion) * inv_batch;
    if (options.hard_indices) options.hard_indices->push_back(q);

    if (!options.grad && !options.rate_grad) continue;

    // Backward.
    const TensorShape& s = f.shape;
    std::vector<double> g_f(s.size(), 0.0);  // dL/df (both terms)
    std::vector<double> g_f_rate(s.size(), 0.0);
    const double rate_scale = cfg.lambda / pixels * inv_batch;
    for (size_t i = 0; i < s.size(); ++i) {
      g_f_rate[i] = rate_scale * rate.grad[i];
    }

    std::span<double> grad =
        options.grad ? std::span<double>(*options.grad) : std::span<double>();
    const std::span<const double> dec_w = params.dec_weights();
    const size_t enc_b_off = channels * kBlockValues;
    const size_t dec_w_off = enc_b_off + channels;
    const size_t dec_b_off = dec_w_off + kBlockValues * channels;

    Block v, g_v;
    for (size_t by = 0; by < s.height; ++by) {
      for (size_t bx = 0; bx < s.width; ++bx) {
        // dL_D / d v_hat for this block.
        for (size_t p = 0; p < 3; ++p) {
          const double scale = 2.0 * kPlaneWeights[p] / pixels * inv_batch;
          for (size_t dy = 0; dy < kBlockSize; ++dy) {
            for (size_t dx = 0; dx < kBlockSize; ++dx) {
              const size_t px = bx * kBlockSize + dx;
              const size_t py = by * kBlockSize + dy;
              g_v[(p * kBlockSize + dy) * kBlockSize + dx] =
                  scale *
                  (x_hat.planes[p].At(px, py) - x.planes[p].At(px, py));
            }
          }
        }
        for (size_t c = 0; c < channels; ++c) {
          const size_t idx = s.Index(c, bx, by);
          double g_soft = 0.0;
          for (size_t i = 0; i < kBlockValues; ++i) {
            g_soft += dec_w[i * channels + c] * g_v[i];
          }
          const double dsoft_df = SoftDequantizeGrad(
              std::span<const double>(soft.grads).subspan(idx * soft.bits,
                                                          soft.bits));
          g_f[idx] = g_soft * dsoft_df + g_f_rate[idx];
        }
        if (!grad.empty()) {
          for (size_t i = 0; i < kBlockValues; ++i) {
            for (size_t c = 0; c < channels; ++c) {
              grad[dec_w_off + i * channels + c] +=
                  g_v[i] * f_soft.samples[s.Index(c, bx, by)];
            }
            grad[dec_b_off + i] += g_v[i];
          }
        }
        // Encoder.
        GatherBlock(x, bx, by, v);
        for (size_t c = 0; c < channels; ++c) {
          const size_t idx = s.Index(c, bx, by);
          if (!grad.empty()) {
            const double g_z = g_f[idx] * dfdz[idx];
            for (size_t j = 0; j < kBlockValues; ++j) {
              grad[c * kBlockValues + j] += g_z * v[j];
            }
            grad[enc_b_off + c] += g_z;
          }
          if (options.rate_grad) {
            const double g_z = g_f_rate[idx] * dfdz[idx];
            auto& rg = *options.rate_grad;
            for (size_t j = 0; j < kBlockValues; ++j) {
              rg[c * kBlockValues + j] += g_z * v[j];
            }
            rg[enc_b_off + c] += g_z;
          }
        }
      }
    }
  }
  return terms;
}

AdamOptimizer::AdamOptimizer(size_t size, double learning_rate)
    : learning_rate_(learning_rate), m_(size, 0.0), v_(size, 0.0) {}

void AdamOptimizer::Step(std::span<double> params,
                         std::span<const double> grad) {
  SOFTBIT_CHECK(params.size() == m_.size() && grad.size() == m_.size(),
                "optimizer size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

StepResult TrainStep(const PatchBatch& batch, ToyModelParams& params,
                     const RegressorParams& regressor, const TrainConfig& cfg,
                     AdamOptimizer& optimizer) {
  StepResult result;
  std::vector<double> grad;
  ObjectiveOptions options;
  options.grad = &grad;
  options.hard_indices = &result.hard_indices;
  result.terms = EvaluateObjective(batch, params, regressor, cfg, options);
  const bool finite = std::isfinite(result.terms.objective) &&
                      std::all_of(grad.begin(), grad.end(),
                                  [](double g) { return std::isfinite(g); });
  if (!finite) {
    std::ostringstream msg;
    msg << "objective " << result.terms.objective << " (L_D "
        << result.terms.distortion << ", bits " << result.terms.rate_bits
        << ") or its gradient is not finite";
    throw Error(ErrorCode::kNonFinite, msg.str());
  }
  optimizer.Step(params.values, grad);
  return result;
}

RegressorParams RefitRegressor(std::span<const QuantIndices> window) {
  ContextStats stats;
  for (const QuantIndices& q : window) stats += CollectStats(q);
  return FitRegressor(stats);
}

HeldOutMetrics EvaluateHeldOut(const PatchBatch& patches,
                               const ToyModelParams& params,
                               const QuantizerConfig& quant) {
  HeldOutMetrics m;
  if (patches.count() == 0) return m;
  for (const ImagePlanes& x : patches.patches) {
    const QuantIndices q = Quantize(ToyEncode(x, params), quant);
    m.bpp += ActualBpp(Encode(q, static_cast<uint32_t>(x.width),
                              static_cast<uint32_t>(x.height)));
    ImagePlanes x_hat = ToyDecode(Dequantize(q), params);
    m.distortion += DistortionLoss(x, x_hat);
    for (Plane& p : x_hat.planes) {
      for (double& v : p.samples) v = std::clamp(v, 0.0, 1.0);
    }
    double psnr = 0.0;
    for (size_t c = 0; c < 3; ++c) psnr += Psnr(x.planes[c], x_hat.planes[c]);
    m.psnr += psnr / 3.0;
  }
  const double n = static_cast<double>(patches.count());
  m.bpp /= n;
  m.distortion /= n;
  m.psnr /= n;
  return m;
}

TrainResult Train(std::span<const ImagePlanes> images, const TrainConfig& cfg,
                  std::span<const ImagePlanes> held_out) {
  cfg.Validate();
  SOFTBIT_CHECK(!images.empty(), "empty dataset");
  for (const ImagePlanes& img : images) {
    SOFTBIT_CHECK(img.width >= cfg.patch_size && img.height >= cfg.patch_size,
                  "dataset image smaller than the patch size");
  }
  TrainResult result;
  result.params = ToyModelParams::Init(cfg.channels, Mix(cfg.seed));
  if (cfg.steps == 0) return result;

  AdamOptimizer optimizer(result.params.values.size(), cfg.learning_rate);
  std::vector<QuantIndices> window;
  for (size_t step = 0; step < cfg.steps; ++step) {
    const PatchBatch batch =
        SamplePatches(images, cfg.patch_size, cfg.batch_size,
                      Mix(cfg.seed ^ Mix(step + 1)));
    if (step % cfg.refit_interval == 0) {
      if (window.empty()) {
        for (const ImagePlanes& x : batch.patches) {
          window.push_back(Quantize(ToyEncode(x, result.params), cfg.quant()));
        }
      }
      result.regressor = RefitRegressor(window);
      window.clear();
    }
    StepResult sr =
        TrainStep(batch, result.params, result.regressor, cfg, optimizer);
    for (QuantIndices& q : sr.hard_indices) window.push_back(std::move(q));
    result.report.steps.push_back(StepRecord{step, sr.terms.distortion,
                                             sr.terms.rate_bits,
                                             sr.terms.objective});
  }

  const std::span<const ImagePlanes> eval_source =
      held_out.empty() ? images : held_out;
  const PatchBatch eval = SamplePatches(eval_source, cfg.patch_size,
                                        cfg.eval_patches, Mix(~cfg.seed));
  const HeldOutMetrics m = EvaluateHeldOut(eval, result.params, cfg.quant());
  result.report.final_bpp = m.bpp;
  result.report.final_distortion = m.distortion;
  result.report.final_psnr = m.psnr;
  return result;
}

std::vector<uint8_t> SerializeModel(const ToyModel& model) {
  std::vector<uint8_t> out(kModelMagic, kModelMagic + 4);
  out.push_back(kModelVersion);
  PutF64(out, static_cast<double>(model.params.channels));
  PutF64(out, static_cast<double>(model.quant.bits));
  PutF64(out, model.soft.alpha);
  for (double v : model.params.values) PutF64(out, v);
  return out;
}

ToyModel ParseModel(std::span<const uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "not an .sbm model file");
  }
  if (bytes.size() < 5 + 3 * 8) {
    throw Error(ErrorCode::kTruncatedBitstream, "model header cut short");
  }
  if (bytes[4] != kModelVersion) {
    throw Error(ErrorCode::kBadVersion,
                "model version " + std::to_string(bytes[4]));
  }
  const double channels = GetF64(bytes, 5);
  const double bits = GetF64(bytes, 13);
  const double alpha = GetF64(bytes, 21);
  if (!(channels >= 1 && channels <= kMaxChannels) ||
      channels != std::floor(channels) || !(bits >= kMinBitDepth) ||
      !(bits <= kMaxBitDepth) || bits != std::floor(bits) ||
      !(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInconsistentBitstream, "invalid model settings");
  }
  ToyModel model;
  model.params = ToyModelParams(static_cast<size_t>(channels));
  model.quant.bits = static_cast<int>(bits);
  model.soft = {alpha, model.quant.bits};
  const size_t need = 5 + 8 * (3 + model.params.values.size());
  if (bytes.size() != need) {
    throw Error(bytes.size() < need ? ErrorCode::kTruncatedBitstream
                                    : ErrorCode::kInconsistentBitstream,
                "model file size mismatch");
  }
  for (size_t i = 0; i < model.params.values.size(); ++i) {
    model.params.values[i] = GetF64(bytes, 29 + 8 * i);
    if (!std::isfinite(model.params.values[i])) {
      throw Error(ErrorCode::kInconsistentBitstream, "non-finite weight");
    }
  }
  return model;
}

void SaveModel(const ToyModel& model, const std::filesystem::path& path) {
  WriteFileAtomic(path, SerializeModel(model));
}

ToyModel LoadModel(const std::filesystem::path& path) {
  return ParseModel(ReadFile(path));
}

}  // namespace softbit
