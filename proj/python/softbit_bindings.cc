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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "softbit/cli.h"
#include "softbit/entropy_codec.h"
#include "softbit/image.h"
#include "softbit/metrics.h"
#include "softbit/pipeline.h"
#include "softbit/quantizer.h"
#include "softbit/softbits.h"
#include "softbit/status.h"
#include "softbit/trainer.h"

namespace py = pybind11;

namespace softbit {
namespace {

std::vector<uint8_t> ToVector(const py::bytes& b) {
  const std::string s = b;
  return {s.begin(), s.end()};
}

py::bytes ToBytes(const std::vector<uint8_t>& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

py::bytes EncodeIndices(const std::vector<uint32_t>& indices, size_t width,
                        size_t height, size_t channels, int bits) {
  QuantIndices q({width, height, channels}, bits);
  if (indices.size() != q.indices.size()) {
    throw Error(ErrorCode::kPrecondition, "index count does not match shape");
  }
  q.indices = indices;
  return ToBytes(Encode(q).Serialize());
}

py::dict DecodeIndices(const py::bytes& data) {
  const QuantIndices q = Decode(ParseBitstream(ToVector(data)));
  py::dict d;
  d["width"] = q.shape.width;
  d["height"] = q.shape.height;
  d["channels"] = q.shape.channels;
  d["bits"] = q.bits;
  d["indices"] = q.indices;
  return d;
}

std::vector<uint32_t> QuantizeList(const std::vector<double>& features, int bits) {
  std::vector<uint32_t> out;
  out.reserve(features.size());
  for (double f : features) out.push_back(QuantizeSample(ClampFeature(f), bits));
  return out;
}

py::dict Evaluate(const std::string& original, const std::string& reconstruction) {
  const QualityScore s =
      ScorePair(RgbToYuv(LoadPpm(original)), RgbToYuv(LoadPpm(reconstruction)), 0.0);
  py::dict d;
  d["psnr_y"] = s.psnr_y;
  d["psnr_u"] = s.psnr_u;
  d["psnr_v"] = s.psnr_v;
  d["psnr_avg"] = s.psnr_avg;
  d["msssim_avg"] = s.msssim_avg ? py::cast(*s.msssim_avg) : py::none();
  return d;
}

std::tuple<int, std::string, std::string> RunCliCaptured(
    const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace
}  // namespace softbit

PYBIND11_MODULE(_softbit, m) {
  using namespace softbit;
  m.doc() = "Soft-bit rate-distortion image codec";
  py::register_exception<Error>(m, "SoftbitError", PyExc_RuntimeError);

  m.def("quantize", &QuantizeList, py::arg("features"), py::arg("bits"));
  m.def("dequantize", &DequantizeSample, py::arg("index"), py::arg("bits"));
  m.def(
      "soft_bits",
      [](double f, double alpha, int bits) { return SoftBits(f, {alpha, bits}); },
      py::arg("f"), py::arg("alpha") = kDefaultAlpha, py::arg("bits") = 4);
  m.def("encode_indices", &EncodeIndices, py::arg("indices"), py::arg("width"),
        py::arg("height"), py::arg("channels"), py::arg("bits"));
  m.def("decode_indices", &DecodeIndices, py::arg("data"));
  m.def(
      "bpp", [](const py::bytes& data) { return ActualBpp(ParseBitstream(ToVector(data))); },
      py::arg("data"));
  m.def(
      "compress",
      [](const std::string& image, const std::string& model) {
        return ToBytes(CompressImage(LoadPpm(image), LoadModel(model)).Serialize());
      },
      py::arg("image"), py::arg("model"));
  m.def(
      "decompress",
      [](const py::bytes& data, const std::string& model, const std::string& out) {
        SavePpm(DecompressImage(ParseBitstream(ToVector(data)), LoadModel(model)), out);
      },
      py::arg("data"), py::arg("model"), py::arg("out"));
  m.def("evaluate", &Evaluate, py::arg("original"), py::arg("reconstruction"));
  m.def("run_cli", &RunCliCaptured, py::arg("args"));
}
