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

#include "softbit/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "softbit/entropy_codec.h"
#include "softbit/image.h"
#include "softbit/metrics.h"
#include "softbit/pipeline.h"
#include "softbit/quantizer.h"
#include "softbit/status.h"
#include "softbit/trainer.h"

namespace softbit {
namespace {

namespace fs = std::filesystem;

struct CliOptions {
  std::string input;
  std::string second_input;
  std::string model;
  std::string out;
  std::string report;
  int bits = 4;
  std::optional<size_t> channels;
  std::optional<double> target_bpp;
  double alpha = kDefaultAlpha;
  double lambda = TrainConfig{}.lambda;
  size_t batch = TrainConfig{}.batch_size;
  double lr = TrainConfig{}.learning_rate;
  size_t steps = TrainConfig{}.steps;
  size_t patch = TrainConfig{}.patch_size;
  uint64_t seed = 0;
};

std::string FormatDouble(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

void RequireFile(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorCode::kIo, std::string(what) + " not found: " + path);
  }
}

int CmdEncode(const CliOptions& o, std::ostream& out) {
  RequireFile(o.input, "input image");
  RequireFile(o.model, "model file");
  const ToyModel model = LoadModel(o.model);
  const RgbImage image = LoadPpm(o.input);
  const Bitstream bs = CompressImage(image, model);
  WriteFileAtomic(o.out, bs.Serialize());
  out << "bpp=" << FormatDouble(ActualBpp(bs)) << "\n";
  out << "bytes=" << bs.SizeBytes() << "\n";
  return kExitOk;
}

Bitstream LoadBitstream(const std::string& path) {
  RequireFile(path, "bitstream");
  return ParseBitstream(ReadFile(path));
}

int CmdDecode(const CliOptions& o, std::ostream& out) {
  RequireFile(o.model, "model file");
  const ToyModel model = LoadModel(o.model);
  const Bitstream bs = LoadBitstream(o.input);
  const RgbImage image = DecompressImage(bs, model);
  SavePpm(image, o.out);
  out << "width=" << image.width << "\n";
  out << "height=" << image.height << "\n";
  return kExitOk;
}

struct LoadedPair {
  std::string name;
  ImagePlanes original;
  ImagePlanes reconstruction;
  std::optional<double> bpp;
};

// Rate of a reconstruction comes from a bitstream with the same stem next to
// it, when one exists.
std::optional<double> MatchingBpp(const fs::path& reconstruction) {
  fs::path sbc = reconstruction;
  sbc.replace_extension(".sbc");
  if (!fs::is_regular_file(sbc)) return std::nullopt;
  return ActualBpp(ParseBitstream(ReadFile(sbc)));
}

LoadedPair LoadPair(const fs::path& original, const fs::path& reconstruction) {
  LoadedPair pair;
  pair.name = original.filename().string();
  pair.original = RgbToYuv(LoadPpm(original));
  pair.reconstruction = RgbToYuv(LoadPpm(reconstruction));
  if (pair.original.width != pair.reconstruction.width ||
      pair.original.height != pair.reconstruction.height) {
    throw Error(ErrorCode::kPrecondition,
                "dimension mismatch for " + pair.name);
  }
  pair.bpp = MatchingBpp(reconstruction);
  return pair;
}

std::vector<fs::path> ListPpm(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ppm") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string CsvValue(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "NA";
}

int CmdEval(const CliOptions& o, std::ostream& out) {
  const fs::path original(o.input);
  const fs::path reconstruction(o.second_input);
  std::vector<LoadedPair> pairs;
  if (fs::is_directory(original)) {
    if (!fs::is_directory(reconstruction)) {
      throw Error(ErrorCode::kIo, "not a directory: " + o.second_input);
    }
    for (const fs::path& file : ListPpm(original)) {
      const fs::path match = reconstruction / file.filename();
      if (fs::is_regular_file(match)) pairs.push_back(LoadPair(file, match));
    }
    if (pairs.empty()) throw Error(ErrorCode::kIo, "no pairs found");
  } else {
    RequireFile(o.input, "original image");
    RequireFile(o.second_input, "reconstruction");
    pairs.push_back(LoadPair(original, reconstruction));
  }

  std::vector<QualityScore> scores;
  bool all_rates = true;
  out << "image,bpp,psnr_avg,msssim_avg\n";
  for (const LoadedPair& p : pairs) {
    const QualityScore s =
        ScorePair(p.original, p.reconstruction, p.bpp.value_or(0.0));
    scores.push_back(s);
    all_rates = all_rates && p.bpp.has_value();
    out << p.name << "," << CsvValue(p.bpp) << "," << FormatDouble(s.psnr_avg)
        << "," << CsvValue(s.msssim_avg) << "\n";
  }
  const QualityScore mean = DatasetSummary(scores);
  out << "mean,"
      << CsvValue(all_rates ? std::optional<double>(mean.bpp) : std::nullopt)
      << "," << FormatDouble(mean.psnr_avg) << "," << CsvValue(mean.msssim_avg)
      << "\n";
  return kExitOk;
}

std::vector<ImagePlanes> LoadDataset(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "dataset directory not found: " + dir);
  }
  std::vector<ImagePlanes> images;
  for (const fs::path& file : ListPpm(dir)) {
    images.push_back(RgbToYuv(LoadPpm(file)));
  }
  if (images.empty()) throw Error(ErrorCode::kIo, "no PPM images in " + dir);
  return images;
}

int CmdTrain(const CliOptions& o, std::ostream& out) {
  TrainConfig cfg;
  cfg.lambda = o.lambda;
  cfg.alpha = o.alpha;
  cfg.bits = o.bits;
  cfg.batch_size = o.batch;
  cfg.learning_rate = o.lr;
  cfg.steps = o.steps;
  cfg.patch_size = o.patch;
  cfg.seed = o.seed;
  if (o.channels) {
    cfg.channels = *o.channels;
  } else if (o.target_bpp) {
    cfg.channels = ChannelsForTargetBpp(*o.target_bpp);
  }
  cfg.Validate();

  const std::vector<ImagePlanes> images = LoadDataset(o.input);
  for (const ImagePlanes& img : images) {
    if (img.width < cfg.patch_size || img.height < cfg.patch_size) {
      throw Error(ErrorCode::kPrecondition,
                  "dataset image smaller than the patch size");
    }
  }
  const TrainResult result = Train(images, cfg);

  const ToyModel model{result.params, cfg.quant(), cfg.soft()};
  const std::string report = o.report.empty() ? o.out + ".report.csv" : o.report;
  const std::string csv = result.report.ToCsv();
  SaveModel(model, o.out);
  WriteFileAtomic(report, std::span(reinterpret_cast<const uint8_t*>(csv.data()),
                                    csv.size()));
  out << "channels=" << cfg.channels << "\n";
  out << "steps=" << cfg.steps << "\n";
  out << "bpp=" << FormatDouble(result.report.final_bpp) << "\n";
  out << "distortion=" << FormatDouble(result.report.final_distortion) << "\n";
  out << "psnr=" << FormatDouble(result.report.final_psnr) << "\n";
  out << "report=" << report << "\n";
  return kExitOk;
}

int CmdInspect(const CliOptions& o, std::ostream& out) {
  const QuantIndices q = Decode(LoadBitstream(o.input));
  const TensorShape& s = q.shape;
  fs::create_directories(o.out);
  std::vector<uint8_t> gray(s.MapSize());
  size_t nonzero = 0;
  for (size_t c = 0; c < s.channels; ++c) {
    for (int k = 0; k < q.bits; ++k) {
      bool any = false;
      for (size_t y = 0; y < s.height; ++y) {
        for (size_t x = 0; x < s.width; ++x) {
          const bool bit = HardBit(q.indices[s.Index(c, x, y)], k, q.bits);
          gray[y * s.width + x] = bit ? 255 : 0;
          any = any || bit;
        }
      }
      nonzero += any ? 1 : 0;
      const fs::path file = fs::path(o.out) / ("map" + std::to_string(c) +
                                               "_plane" + std::to_string(k) +
                                               ".pgm");
      WriteFileAtomic(file, EncodePgm(s.width, s.height, gray));
    }
  }
  out << "files=" << s.channels * static_cast<size_t>(q.bits) << "\n";
  out << "nonzero_planes=" << nonzero << "\n";
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  return e.code() == ErrorCode::kNonFinite ? kExitFailure : kExitBadInput;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Soft-bit learned image codec toolkit", "softbit"};
  app.require_subcommand(1);
  CliOptions o;

  CLI::App* encode = app.add_subcommand("encode", "Compress a PPM image");
  encode->add_option("input", o.input, "Input PPM")->required();
  encode->add_option("--model", o.model, "Model file (.sbm)")->required();
  encode->add_option("--out", o.out, "Output bitstream (.sbc)")->required();

  CLI::App* decode = app.add_subcommand("decode", "Decompress to a PPM image");
  decode->add_option("input", o.input, "Input bitstream (.sbc)")->required();
  decode->add_option("--model", o.model, "Model file (.sbm)")->required();
  decode->add_option("--out", o.out, "Output PPM")->required();

  CLI::App* eval = app.add_subcommand(
      "eval", "Score reconstructions against originals (files or directories)");
  eval->add_option("original", o.input, "Original PPM or directory")
      ->required();
  eval->add_option("reconstruction", o.second_input,
                   "Reconstructed PPM or directory")
      ->required();

  CLI::App* train = app.add_subcommand("train", "Train a toy model");
  train->option_defaults()->always_capture_default();
  train->add_option("dataset", o.input, "Directory of PPM images")->required();
  train->add_option("--out", o.out, "Output model (.sbm)")->required();
  train->add_option("--report", o.report,
                    "Report CSV (default: <out>.report.csv)");
  train->add_option("--bits", o.bits, "Quantizer bit depth")
      ->check(CLI::Range(kMinBitDepth, kMaxBitDepth));
  train->add_option("--channels", o.channels, "Feature maps C")
      ->check(CLI::Range(size_t{1}, kMaxChannels));
  train->add_option("--target-bpp", o.target_bpp,
                    "Choose C from a target rate when --channels is absent");
  train->add_option("--alpha", o.alpha, "Soft-bit sharpness");
  train->add_option("--lambda", o.lambda, "Rate weight");
  train->add_option("--batch", o.batch, "Batch size");
  train->add_option("--lr", o.lr, "Adam learning rate");
  train->add_option("--steps", o.steps, "Training steps");
  train->add_option("--patch", o.patch, "Patch size (multiple of 8)");
  train->add_option("--seed", o.seed, "Random seed");

  CLI::App* inspect =
      app.add_subcommand("inspect", "Dump bitplanes of a bitstream as PGM");
  inspect->add_option("input", o.input, "Input bitstream (.sbc)")->required();
  inspect->add_option("--out", o.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  try {
    if (encode->parsed()) return CmdEncode(o, out);
    if (decode->parsed()) return CmdDecode(o, out);
    if (eval->parsed()) return CmdEval(o, out);
    if (train->parsed()) return CmdTrain(o, out);
    if (inspect->parsed()) return CmdInspect(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitBadInput;
}

}  // namespace softbit
