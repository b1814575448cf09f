#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bittrunc/tensortrunc.hpp"
#include "bittrunc/videopipe.hpp"
#include "cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using bittrunc::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bittrunc");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bittrunc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& content) const {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

std::string gray_clip(unsigned w, unsigned h, unsigned frames) {
  bittrunc::video::VideoClip c;
  c.width = w;
  c.height = h;
  for (unsigned i = 0; i < frames; ++i) c.frames.push_back(bittrunc::video::FramePlanar420::filled(w, h, 120));
  const auto bytes = bittrunc::video::encode_i420(c);
  return {bytes.begin(), bytes.end()};
}

}  // namespace

TEST_F(CliTest, VerifyDefaults) {
  const auto r = invoke({"verify-prop1"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["violations"], 0);
  EXPECT_EQ(j["cases"], 208);
  EXPECT_EQ(j["ties"], 208);
}

TEST_F(CliTest, VerifyValidation) {
  EXPECT_EQ(invoke({"verify-prop1", "--max-cardinality", "20"}).code, 2);
  const auto r = invoke({"verify-prop1", "--samples", "0", "--report", "csv"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 9);
}

TEST_F(CliTest, VerifyDeterministic) {
  EXPECT_EQ(invoke({"--seed", "3", "verify-prop1", "--report", "csv"}).out,
            invoke({"--seed", "3", "verify-prop1", "--report", "csv"}).out);
}

TEST_F(CliTest, SimBundledScript) {
  const auto csv = path("trace.csv");
  const auto r = invoke({"sim", BITTRUNC_TIMING_SCRIPT, "--trace-out", csv});
  EXPECT_EQ(r.code, 0);
  const auto text = slurp(csv);
  for (const char* word : {"01010101010101010101010101010101", "01010110010101100101011001010110",
                           "01010100010101000101010001010100", "01011000010110000101100001011000"}) {
    EXPECT_NE(text.find(word), std::string::npos) << word;
  }
  EXPECT_NE(r.out.find("0x58585858"), std::string::npos);
}

TEST_F(CliTest, SimErrors) {
  const auto r = invoke({"sim", file("bad.tmscript", "NOP\nNOP\nNOP\nNOP\nFLIP 1\n")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 5"), std::string::npos);
  const auto empty = invoke({"sim", file("empty.tmscript", "")});
  EXPECT_EQ(empty.code, 0);
  const auto strict = file("x.tmscript", "WRITE 0 FFFFFFFF\nTRUNC BYTE 4\nTRUNC BYTE 2\nREAD 0\n");
  EXPECT_EQ(invoke({"sim", strict}).code, 0);
  EXPECT_EQ(invoke({"sim", "--strict", strict}).code, 3);
  const auto lint = invoke({"sim", "--lint", file("l.tmscript", "TRUNC WORD 4\nWRITE 0 1\n")});
  EXPECT_NE(lint.err.find("warning"), std::string::npos);
  EXPECT_EQ(invoke({"sim", path("missing.tmscript")}).code, 2);
}

TEST_F(CliTest, Power) {
  const auto r = invoke({"--report", "csv", "power", "--mode", "word", "--k", "17"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("word,17,51.69,"), std::string::npos) << r.out;
  const auto j = nlohmann::json::parse(invoke({"power", "--mode", "byte"}).out);
  EXPECT_EQ(j["levels"].size(), 9u);
  EXPECT_NEAR(j["levels"][3]["savings_pct"].get<double>(), 34.93, 1e-9);
  const auto lin = nlohmann::json::parse(invoke({"--model", "linear", "power", "--mode", "byte", "--k", "4"}).out);
  EXPECT_NEAR(lin["levels"][0]["savings_pct"].get<double>(), 47.6, 1e-9);
  const auto dd = nlohmann::json::parse(invoke({"power", "--k", "8", "--data-word", "0x12345600"}).out);
  EXPECT_NEAR(dd["levels"][0]["read_power_uW"].get<double>(), 296.0 / 0.119 - 720.0, 1e-9);
  EXPECT_EQ(invoke({"power", "--mode", "byte", "--k", "9"}).code, 2);
  EXPECT_EQ(invoke({"power", "--data-word", "zz"}).code, 2);
  EXPECT_EQ(invoke({"--model", "cubic", "power"}).code, 2);
}

TEST_F(CliTest, PowerCalibrationFile) {
  const auto cal = file("cal.txt", "[word]\nanchors = [[0, 0], [10, 40]]\n");
  const auto j = nlohmann::json::parse(invoke({"--calibration", cal, "power", "--k", "5"}).out);
  EXPECT_NEAR(j["levels"][0]["savings_pct"].get<double>(), 20.0, 1e-12);
  EXPECT_EQ(invoke({"--calibration", file("bad.txt", "[word]\nanchors = oops\n"), "power"}).code, 2);
}

TEST_F(CliTest, VideoLuminanceSunlight) {
  const auto in = file("gray.yuv", gray_clip(32, 32, 2));
  const auto out = path("out.yuv");
  const auto r = invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "luminance",
                         "--condition", "sunlight", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["aggregate"]["savings_pct"].get<double>(), 47.02, 1e-9);
  EXPECT_EQ(fs::file_size(out), fs::file_size(in));
}

TEST_F(CliTest, VideoRoiEmptyIsUniformThree) {
  const auto in = file("gray.yuv", gray_clip(32, 32, 1));
  const auto roi = file("empty.txt", "# nothing\n");
  const auto r = invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "roi", "--roi", roi});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["aggregate"]["savings_pct"].get<double>(), 34.93, 1e-9);
}

TEST_F(CliTest, VideoContentOnGray) {
  const auto in = file("gray.yuv", gray_clip(32, 32, 1));
  const auto r = invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "content"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["aggregate"]["savings_pct"].get<double>(), 47.02, 1e-9);
  EXPECT_EQ(j["parameters"]["k"], "4");
}

TEST_F(CliTest, VideoErrors) {
  const auto in = file("gray.yuv", gray_clip(32, 32, 1));
  EXPECT_EQ(invoke({"video", "--input", in, "--width", "30", "--height", "32", "--policy", "content"}).code, 2);
  EXPECT_EQ(invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "roi"}).code, 2);
  EXPECT_EQ(invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "luminance",
                    "--content-map", "0:0"})
                .code,
            2);
  EXPECT_EQ(invoke({"video", "--input", in, "--width", "32", "--height", "32", "--policy", "blur"}).code, 2);
}

TEST_F(CliTest, VideoReportFormatsAgree) {
  const auto in = file("gray.yuv", gray_clip(32, 32, 2));
  const std::vector<std::string> base{"video", "--input", in, "--width", "32", "--height", "32", "--policy",
                                      "luminance"};
  auto csv_args = base;
  csv_args.insert(csv_args.begin(), {"--report", "csv"});
  const auto j = nlohmann::json::parse(invoke(base).out);
  const auto csv = invoke(csv_args).out;
  std::istringstream is(csv);
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_NE(row.find(nlohmann::json(j["frames"][0]["savings_pct"]).dump()), std::string::npos);
}

TEST_F(CliTest, TensorTruncateAndSweep) {
  const auto t = path("w.trnt");
  ASSERT_EQ(invoke({"--seed", "1", "tensor", "generate", "--count", "4096", "--output", t}).code, 0);
  const auto same = path("same.trnt");
  ASSERT_EQ(invoke({"tensor", "truncate", "--input", t, "--n", "0", "--output", same}).code, 0);
  EXPECT_EQ(slurp(t), slurp(same));
  EXPECT_EQ(invoke({"tensor", "truncate", "--input", t, "--n", "24"}).code, 2);
  EXPECT_EQ(invoke({"tensor", "truncate", "--input", t, "--n", "1,2"}).code, 2);

  const auto r = invoke({"--model", "anchored", "tensor", "sweep", "--input", t, "--n", "0..23"});
  ASSERT_EQ(r.code, 0);
  std::istringstream is(r.out);
  std::string line;
  int rows = 0;
  bool saw = false;
  while (std::getline(is, line)) {
    ++rows;
    if (line.rfind("17,", 0) == 0) saw = line.ends_with(",51.69");
  }
  EXPECT_EQ(rows, 25);
  EXPECT_TRUE(saw) << r.out;
}

TEST_F(CliTest, TensorRawAndErrors) {
  const auto raw = path("w.f32");
  ASSERT_EQ(invoke({"tensor", "generate", "--shape", "4,4", "--raw", "--output", raw}).code, 0);
  EXPECT_EQ(fs::file_size(raw), 64u);
  const auto out = path("t.f32");
  ASSERT_EQ(invoke({"tensor", "truncate", "--raw", "--shape", "4x4", "--input", raw, "--n", "23", "--output", out})
                .code,
            0);
  EXPECT_EQ(fs::file_size(out), 64u);
  EXPECT_EQ(invoke({"tensor", "truncate", "--raw", "--shape", "5", "--input", raw, "--n", "1"}).code, 2);
  EXPECT_EQ(invoke({"tensor", "truncate", "--input", file("bad.trnt", "XXXX\x01\x01\x01"), "--n", "1"}).code, 2);
  EXPECT_EQ(invoke({"tensor", "generate", "--output", path("none.trnt")}).code, 2);
  EXPECT_EQ(invoke({"tensor"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
}
