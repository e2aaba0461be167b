#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "softbit/cli.h"
#include "softbit/entropy_codec.h"
#include "softbit/image.h"
#include "softbit/metrics.h"
#include "softbit/pipeline.h"
#include "softbit/trainer.h"
#include "test_util.h"

namespace softbit {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun Run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = RunCli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string Value(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  }
  return "";
}

void WriteDataset(const fs::path& dir, size_t count, size_t w, size_t h,
                  uint64_t seed) {
  fs::create_directories(dir);
  const std::vector<ImagePlanes> imgs = SyntheticImages(count, w, h, seed);
  for (size_t i = 0; i < count; ++i) {
    SavePpm(YuvToRgb(imgs[i]), dir / ("img" + std::to_string(i) + ".ppm"));
  }
}

TEST_CASE("usage errors exit with status 2") {
  CHECK(Run({}).status == kExitBadInput);
  CHECK(Run({"bogus"}).status == kExitBadInput);
  CHECK(Run({"encode", "x.ppm"}).status == kExitBadInput);
  const CliRun help = Run({"--help"});
  CHECK(help.status == kExitOk);
  CHECK(help.out.find("encode") != std::string::npos);
}

TEST_CASE("train defaults follow batch 8 and lr 1e-4") {
  const CliRun help = Run({"train", "--help"});
  CHECK(help.status == kExitOk);
  CHECK(help.out.find("--batch") != std::string::npos);
  CHECK(help.out.find("[8]") != std::string::npos);
  CHECK(help.out.find("[0.0001]") != std::string::npos);
}

TEST_CASE("missing model file") {
  testing::TempDir dir("cli");
  WriteDataset(dir / "data", 1, 16, 16, 1);
  const CliRun r = Run({"encode", (dir / "data" / "img0.ppm").string(), "--model",
                        (dir / "none.sbm").string(), "--out",
                        (dir / "x.sbc").string()});
  CHECK(r.status == 2);
  CHECK(r.err.find("model") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.sbc"));
}

TEST_CASE("train with zero steps writes the initial model and empty report") {
  testing::TempDir dir("cli");
  WriteDataset(dir / "data", 2, 32, 32, 2);
  const fs::path model = dir / "m.sbm";
  const CliRun r = Run({"train", (dir / "data").string(), "--out", model.string(),
                        "--steps", "0", "--channels", "3", "--patch", "16",
                        "--seed", "5"});
  REQUIRE(r.status == 0);
  const ToyModel m = LoadModel(model);
  TrainConfig cfg;
  cfg.channels = 3;
  cfg.patch_size = 16;
  cfg.steps = 0;
  cfg.seed = 5;
  const std::vector<ImagePlanes> imgs = SyntheticImages(2, 32, 32, 2);
  CHECK(m.params == Train(imgs, cfg).params);
  CHECK(ReadFile(model.string() + ".report.csv").size() ==
        std::string("step,L_D,L_R_bits,objective\n").size());
}

TEST_CASE("train is reproducible and honours the target-rate rule") {
  testing::TempDir dir("cli");
  WriteDataset(dir / "data", 2, 32, 32, 3);
  auto train = [&](const std::string& name, std::vector<std::string> extra) {
    std::vector<std::string> args = {"train", (dir / "data").string(), "--out",
                                     (dir / name).string(), "--steps", "5",
                                     "--patch", "16", "--batch", "2",
                                     "--seed", "9"};
    args.insert(args.end(), extra.begin(), extra.end());
    return Run(args);
  };
  REQUIRE(train("a.sbm", {"--target-bpp", "0.1"}).status == 0);
  REQUIRE(train("b.sbm", {"--target-bpp", "0.1"}).status == 0);
  CHECK(ReadFile(dir / "a.sbm") == ReadFile(dir / "b.sbm"));
  CHECK(LoadModel(dir / "a.sbm").params.channels == 4);
  const CliRun mid = train("c.sbm", {"--target-bpp", "0.3", "--report",
                                     (dir / "c.csv").string()});
  REQUIRE(mid.status == 0);
  CHECK(LoadModel(dir / "c.sbm").params.channels == 8);
  CHECK(fs::exists(dir / "c.csv"));
  CHECK(Value(mid.out, "channels") == "8");
  REQUIRE(train("d.sbm", {"--target-bpp", "0.9", "--channels", "2"}).status == 0);
  CHECK(LoadModel(dir / "d.sbm").params.channels == 2);
  CHECK(Run({"train", (dir / "nothing").string(), "--out", (dir / "e.sbm").string()})
            .status == 2);
}

struct Fixture {
  testing::TempDir dir{"cli"};
  fs::path image, model, stream;
  ToyModel toy;
  Fixture() {
    WriteDataset(dir / "data", 1, 37, 29, 4);
    image = dir / "data" / "img0.ppm";
    toy = ToyModel{ToyModelParams::Init(4, 3), {4}, {50.0, 4}};
    for (double& w : toy.params.enc_weights()) w *= 10;
    model = dir / "m.sbm";
    SaveModel(toy, model);
    stream = dir / "img0.sbc";
  }
};

TEST_CASE("encode then decode reproduces the quantized reconstruction") {
  Fixture fx;
  const CliRun enc = Run({"encode", fx.image.string(), "--model", fx.model.string(),
                          "--out", fx.stream.string()});
  REQUIRE(enc.status == 0);
  const Bitstream bs = ParseBitstream(ReadFile(fx.stream));
  CHECK(std::stod(Value(enc.out, "bpp")) == doctest::Approx(ActualBpp(bs)));

  const fs::path out1 = fx.dir / "r1.ppm", out2 = fx.dir / "r2.ppm";
  REQUIRE(Run({"decode", fx.stream.string(), "--model", fx.model.string(), "--out",
               out1.string()}).status == 0);
  REQUIRE(Run({"decode", fx.stream.string(), "--model", fx.model.string(), "--out",
               out2.string()}).status == 0);
  CHECK(ReadFile(out1) == ReadFile(out2));
  const RgbImage decoded = LoadPpm(out1);
  CHECK(decoded.width == 37);
  CHECK(decoded.height == 29);
  const RgbImage original = LoadPpm(fx.image);
  const ImagePlanes padded = PadToMultiple(RgbToYuv(original), 8);
  const ImagePlanes direct = Crop(
      ToyDecode(Dequantize(Quantize(ToyEncode(padded, fx.toy.params), fx.toy.quant)),
                fx.toy.params),
      37, 29);
  CHECK(decoded == YuvToRgb(direct));
}

TEST_CASE("corrupt or truncated bitstreams fail without output") {
  Fixture fx;
  REQUIRE(Run({"encode", fx.image.string(), "--model", fx.model.string(), "--out",
               fx.stream.string()}).status == 0);
  std::vector<uint8_t> bytes = ReadFile(fx.stream);
  bytes.resize(bytes.size() / 2);
  WriteFileAtomic(fx.dir / "cut.sbc", bytes);
  const fs::path out = fx.dir / "cut.ppm";
  const CliRun r = Run({"decode", (fx.dir / "cut.sbc").string(), "--model",
                        fx.model.string(), "--out", out.string()});
  CHECK(r.status != 0);
  CHECK_FALSE(r.err.empty());
  CHECK_FALSE(fs::exists(out));
  const CliRun i = Run({"inspect", (fx.dir / "cut.sbc").string(), "--out",
                        (fx.dir / "planes").string()});
  CHECK(i.status != 0);
  CHECK((!fs::exists(fx.dir / "planes") || fs::is_empty(fx.dir / "planes")));
  // Nothing else was left behind in the working directory.
  for (const auto& e : fs::directory_iterator(fx.dir.path())) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
}

TEST_CASE("eval: identical files, single pair, directories") {
  testing::TempDir dir("cli");
  WriteDataset(dir / "orig", 2, 180, 176, 5);
  const CliRun same = Run({"eval", (dir / "orig" / "img0.ppm").string(),
                           (dir / "orig" / "img0.ppm").string()});
  REQUIRE(same.status == 0);
  CHECK(same.out.find("image,bpp,psnr_avg,msssim_avg\n") == 0);
  CHECK(same.out.find("img0.ppm,NA,99,1\n") != std::string::npos);
  CHECK(same.out.find("mean,NA,99,1\n") != std::string::npos);

  fs::create_directories(dir / "rec");
  const RgbImage a = LoadPpm(dir / "orig" / "img1.ppm");
  RgbImage b = a;
  for (uint8_t& s : b.samples) s = static_cast<uint8_t>(s / 2 + 10);
  SavePpm(b, dir / "rec" / "img1.ppm");
  Bitstream fake;
  fake.header.bits = 4;
  fake.header.channels = 1;
  fake.header.padded_width = 184;
  fake.header.padded_height = 176;
  fake.header.original_width = 180;
  fake.header.original_height = 176;
  fake.payload.assign(100, 0);
  WriteFileAtomic(dir / "rec" / "img1.sbc", fake.Serialize());

  const CliRun pair = Run({"eval", (dir / "orig").string(), (dir / "rec").string()});
  REQUIRE(pair.status == 0);
  const QualityScore direct = ScorePair(RgbToYuv(a), RgbToYuv(b), 0.0);
  std::istringstream lines(pair.out);
  std::string header, row, mean;
  std::getline(lines, header);
  std::getline(lines, row);
  std::getline(lines, mean);
  CHECK(row.rfind("img1.ppm,", 0) == 0);
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string cell; std::getline(rs, cell, ',');) cells.push_back(cell);
  REQUIRE(cells.size() == 4);
  CHECK(std::stod(cells[1]) == doctest::Approx(ActualBpp(fake)));
  CHECK(std::stod(cells[2]) == doctest::Approx(direct.psnr_avg).epsilon(1e-9));
  CHECK(std::stod(cells[3]) == doctest::Approx(*direct.msssim_avg).epsilon(1e-9));
  CHECK(mean.rfind("mean,", 0) == 0);

  fs::create_directories(dir / "empty");
  const CliRun none = Run({"eval", (dir / "empty").string(), (dir / "rec").string()});
  CHECK(none.status == 2);
  CHECK(none.err.find("no pairs found") != std::string::npos);

  SavePpm(RgbImage(5, 5), dir / "rec" / "img0.ppm");
  CHECK(Run({"eval", (dir / "orig").string(), (dir / "rec").string()}).status == 2);
}

TEST_CASE("inspect writes one PGM per map and plane") {
  testing::TempDir dir("cli");
  std::mt19937_64 rng(8);
  const QuantIndices q = testing::RandomIndices({5, 3, 4}, 4, rng);
  WriteFileAtomic(dir / "q.sbc", Encode(q).Serialize());
  const CliRun r = Run({"inspect", (dir / "q.sbc").string(), "--out",
                        (dir / "planes").string()});
  REQUIRE(r.status == 0);
  CHECK(Value(r.out, "files") == "16");
  size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "planes")) {
    (void)e;
    ++files;
  }
  CHECK(files == 16);
  std::vector<uint32_t> rebuilt(q.indices.size(), 0);
  for (size_t c = 0; c < 4; ++c) {
    for (int k = 0; k < 4; ++k) {
      const std::vector<uint8_t> pgm = ReadFile(
          dir / "planes" / ("map" + std::to_string(c) + "_plane" + std::to_string(k) + ".pgm"));
      const std::string header = "P5\n5 3\n255\n";
      REQUIRE(pgm.size() == header.size() + 15);
      CHECK(std::string(pgm.begin(), pgm.begin() + header.size()) == header);
      for (size_t i = 0; i < 15; ++i) {
        const uint8_t v = pgm[header.size() + i];
        REQUIRE((v == 0 || v == 255));
        rebuilt[c * 15 + i] |= uint32_t(v == 255) << (4 - 1 - k);
      }
    }
  }
  CHECK(rebuilt == q.indices);

  WriteFileAtomic(dir / "z.sbc", Encode(QuantIndices({3, 3, 2}, 2)).Serialize());
  REQUIRE(Run({"inspect", (dir / "z.sbc").string(), "--out", (dir / "zp").string()})
              .status == 0);
  for (const auto& e : fs::directory_iterator(dir / "zp")) {
    const std::vector<uint8_t> pgm = ReadFile(e.path());
    for (size_t i = pgm.size() - 9; i < pgm.size(); ++i) CHECK(pgm[i] == 0);
  }
}

TEST_CASE("the installed binary reports exit codes") {
  const char* cli = std::getenv("SOFTBIT_CLI");
  if (!cli) return;
  testing::TempDir dir("cli");
  const std::string base = std::string("\"") + cli + "\"";
  CHECK(std::system((base + " --help > /dev/null").c_str()) == 0);
  const int missing =
      std::system((base + " decode " + (dir / "none.sbc").string() + " --model " +
                   (dir / "none.sbm").string() + " --out " + (dir / "x.ppm").string() +
                   " 2> /dev/null").c_str());
  CHECK(WEXITSTATUS(missing) == 2);
}

}  // namespace
}  // namespace softbit
