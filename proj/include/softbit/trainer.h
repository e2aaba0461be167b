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

#ifndef SOFTBIT_TRAINER_H_
#define SOFTBIT_TRAINER_H_

// Rate-distortion training of a toy block autoencoder.
//
// Encoder: every 8x8 block of a YUV patch is flattened to a 192-vector v
// (plane-major, then row-major: v[p * 64 + dy * 8 + dx]) and mapped to C
// features f_c = logistic(w_c . v + bias_c). Decoder: v_hat = W_d f + b_d.
//
// Training minimizes, per patch and averaged over the batch,
//   lambda * (estimated bits / pixels) + L_D,
// where L_D = (4 MSE_Y + MSE_U + MSE_V) / 6 is measured on the soft-bit
// reconstruction and the bits come from the rate model. Gradients are
// exact: through the decoder, the soft dequantizer, the soft bits, the
// probability regressor and the encoder logistic.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "softbit/bitplane.h"
#include "softbit/image.h"
#include "softbit/quantizer.h"
#include "softbit/rate_model.h"
#include "softbit/softbits.h"

namespace softbit {

constexpr size_t kBlockSize = 8;
constexpr size_t kBlockValues = kBlockSize * kBlockSize * 3;  // 192
constexpr size_t kMaxChannels = 64;

// All parameters in one flat vector, in this order:
//   enc_weights  C x 192  (row c holds w_c)
//   enc_bias     C
//   dec_weights  192 x C  (row i maps features to block value i)
//   dec_bias     192
struct ToyModelParams {
  size_t channels = 0;
  std::vector<double> values;

  ToyModelParams() = default;
  explicit ToyModelParams(size_t channels);

  // Uniform weights in [-0.05, 0.05], zero biases.
  static ToyModelParams Init(size_t channels, uint64_t seed);

  std::span<double> enc_weights();
  std::span<double> enc_bias();
  std::span<double> dec_weights();
  std::span<double> dec_bias();
  std::span<const double> enc_weights() const;
  std::span<const double> enc_bias() const;
  std::span<const double> dec_weights() const;
  std::span<const double> dec_bias() const;

  bool operator==(const ToyModelParams&) const = default;
};

struct TrainConfig {
  double lambda = 0.01;
  double alpha = kDefaultAlpha;
  int bits = 4;
  size_t channels = 8;
  size_t batch_size = 8;
  double learning_rate = 1e-4;
  size_t steps = 1000;
  size_t refit_interval = 100;
  size_t patch_size = 128;
  uint64_t seed = 0;
  // Patches for the final held-out evaluation.
  size_t eval_patches = 16;

  void Validate() const;
  SoftBitConfig soft() const { return {alpha, bits}; }
  QuantizerConfig quant() const { return {bits}; }
};

struct StepRecord {
  size_t step = 0;
  double distortion = 0.0;  // L_D, batch mean
  double rate_bits = 0.0;   // estimated bits per patch, batch mean
  double objective = 0.0;
};

struct TrainReport {
  std::vector<StepRecord> steps;
  // Held-out evaluation through the real quantizer and coder.
  double final_bpp = 0.0;
  double final_distortion = 0.0;
  double final_psnr = 0.0;

  std::string ToCsv() const;
};

// Features of a patch whose sides are multiples of 8, clamped by the
// quantizer rule.
FeatureTensor ToyEncode(const ImagePlanes& patch, const ToyModelParams& params);
// Affine decode of a (W/8) x (H/8) x C grid; no clamping.
ImagePlanes ToyDecode(const FeatureTensor& features,
                      const ToyModelParams& params);

// (4 MSE_Y + MSE_U + MSE_V) / 6 on the [0,1] scale.
double DistortionLoss(const ImagePlanes& x, const ImagePlanes& x_hat);

struct ObjectiveTerms {
  double distortion = 0.0;
  double rate_bits = 0.0;
  double objective = 0.0;
};

struct ObjectiveOptions {
  // Contexts per patch (AssignContexts layout). When absent they are derived
  // from the hard indices of the current forward pass.
  const std::vector<std::vector<ContextId>>* frozen_contexts = nullptr;
  // Receives d objective / d params.values when set.
  std::vector<double>* grad = nullptr;
  // Receives the hard indices of every patch when set.
  std::vector<QuantIndices>* hard_indices = nullptr;
  // Receives just the rate part of the encoder-side gradient (lambda
  // included) when set; used to check that the rate path is active.
  std::vector<double>* rate_grad = nullptr;
};

ObjectiveTerms EvaluateObjective(const PatchBatch& batch,
                                 const ToyModelParams& params,
                                 const RegressorParams& regressor,
                                 const TrainConfig& cfg,
                                 const ObjectiveOptions& options = {});

class AdamOptimizer {
 public:
  AdamOptimizer(size_t size, double learning_rate);
  void Step(std::span<double> params, std::span<const double> grad);

 private:
  double learning_rate_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double epsilon_ = 1e-8;
  uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct StepResult {
  ObjectiveTerms terms;
  std::vector<QuantIndices> hard_indices;
};

// One phase-2 update: forward, exact backward, Adam step.
StepResult TrainStep(const PatchBatch& batch, ToyModelParams& params,
                     const RegressorParams& regressor, const TrainConfig& cfg,
                     AdamOptimizer& optimizer);

// Phase 1: fit the regressor to the context statistics of a window of
// quantized features.
RegressorParams RefitRegressor(std::span<const QuantIndices> window);

struct TrainResult {
  ToyModelParams params;
  RegressorParams regressor;
  TrainReport report;
};

// Alternates phase 1 (every refit_interval steps, on the indices produced
// since the last refit) with phase 2 updates. Deterministic given the data
// and cfg. Held-out patches are drawn from `held_out` when given, else from
// `images` with a separate seed.
TrainResult Train(std::span<const ImagePlanes> images, const TrainConfig& cfg,
                  std::span<const ImagePlanes> held_out = {});

struct HeldOutMetrics {
  double bpp = 0.0;
  double distortion = 0.0;
  double psnr = 0.0;
};
HeldOutMetrics EvaluateHeldOut(const PatchBatch& patches,
                               const ToyModelParams& params,
                               const QuantizerConfig& quant);

// Deployed model: parameters plus the quantizer and soft-bit settings.
//
// .sbm layout: "SBM1", u8 version (1), then little-endian float64 values:
// channels, bits, alpha, followed by ToyModelParams::values.
struct ToyModel {
  ToyModelParams params;
  QuantizerConfig quant;
  SoftBitConfig soft;
};

constexpr uint8_t kModelVersion = 1;

std::vector<uint8_t> SerializeModel(const ToyModel& model);
ToyModel ParseModel(std::span<const uint8_t> bytes);
void SaveModel(const ToyModel& model, const std::filesystem::path& path);
ToyModel LoadModel(const std::filesystem::path& path);

}  // namespace softbit

#endif  // SOFTBIT_TRAINER_H_
