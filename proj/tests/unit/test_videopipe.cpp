#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "bittrunc/errors.hpp"
#include "bittrunc/videopipe.hpp"
#include "oracles.hpp"

using namespace bittrunc;
using namespace bittrunc::video;
using bittrunc::power::SavingsEstimator;

namespace {

FramePlanar420 noise_frame(unsigned w, unsigned h, std::uint64_t seed) {
  auto f = FramePlanar420::filled(w, h, 0);
  f.y = oracle::uniform_bytes(f.y.size(), seed);
  f.u = oracle::uniform_bytes(f.u.size(), seed + 1);
  f.v = oracle::uniform_bytes(f.v.size(), seed + 2);
  return f;
}

VideoClip clip_of(std::vector<FramePlanar420> frames) {
  VideoClip c;
  c.width = frames.at(0).width;
  c.height = frames.at(0).height;
  c.frames = std::move(frames);
  return c;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bittrunc_video_" + name);
}

}  // namespace

TEST(YuvIo, SizesAndRoundTrip) {
  EXPECT_EQ(frame_bytes(64, 64), 6144u);
  EXPECT_THROW(frame_bytes(63, 64), InvalidArgument);
  const auto clip = clip_of({noise_frame(64, 64, 1), noise_frame(64, 64, 2)});
  const auto bytes = encode_i420(clip);
  ASSERT_EQ(bytes.size(), 12288u);
  const auto back = decode_i420(bytes, 64, 64);
  EXPECT_EQ(back.frames.size(), 2u);
  EXPECT_EQ(back, clip);

  const auto path = temp_path("rt.yuv");
  save_yuv(clip, path);
  EXPECT_EQ(load_yuv(path, 64, 64), clip);
  std::filesystem::remove(path);
}

TEST(YuvIo, SizeMismatch) {
  std::vector<std::uint8_t> bytes(12289);
  EXPECT_THROW(decode_i420(bytes, 64, 64), FormatError);
  EXPECT_THROW(load_yuv(temp_path("missing.yuv"), 64, 64), FormatError);
}

TEST(Macroblocks, ConstantFrameIsPlain) {
  const auto g = analyze_macroblocks(FramePlanar420::filled(64, 48, 128));
  EXPECT_EQ(g.blocks_x, 4u);
  EXPECT_EQ(g.blocks_y, 3u);
  EXPECT_EQ(g.plain_pct, 100.0);
  for (double v : g.variance) EXPECT_EQ(v, 0.0);
}

TEST(Macroblocks, NoiseFrameIsBusy) {
  const auto g = analyze_macroblocks(noise_frame(256, 256, 3));
  EXPECT_EQ(g.plain_pct, 0.0);
  double mean = 0;
  for (double v : g.variance) mean += v;
  mean /= double(g.variance.size());
  EXPECT_NEAR(mean, (256.0 * 256.0 - 1) / 12.0, 150.0);
}

TEST(Macroblocks, VarianceMatchesDirectComputation) {
  const auto f = noise_frame(32, 32, 4);
  const auto g = analyze_macroblocks(f);
  double sum = 0, sq = 0;
  for (unsigned y = 16; y < 32; ++y)
    for (unsigned x = 0; x < 16; ++x) {
      sum += f.y[y * 32 + x];
      sq += double(f.y[y * 32 + x]) * f.y[y * 32 + x];
    }
  EXPECT_NEAR(g.variance[2], sq / 256 - (sum / 256) * (sum / 256), 1e-9);
}

TEST(Macroblocks, HalfFlatHalfNoise) {
  auto f = noise_frame(128, 128, 5);
  std::fill(f.y.begin(), f.y.begin() + 64 * 128, 90);
  EXPECT_NEAR(analyze_macroblocks(f).plain_pct, 50.0, 1e-9);
}

TEST(Policies, Luminance) {
  EXPECT_EQ(policy_luminance(LuminanceCondition::Overcast), 3u);
  EXPECT_EQ(policy_luminance(LuminanceCondition::Sunlight), 4u);
  EXPECT_EQ(policy_luminance(LuminanceCondition::Normal), 0u);
  EXPECT_EQ(parse_luminance_condition("sunlight"), LuminanceCondition::Sunlight);
  EXPECT_THROW(parse_luminance_condition("dusk"), InvalidArgument);
}

TEST(Policies, Content) {
  EXPECT_EQ(policy_content(0.0), 0u);
  EXPECT_EQ(policy_content(19.9), 0u);
  EXPECT_EQ(policy_content(20.0), 1u);
  EXPECT_EQ(policy_content(59.0), 2u);
  EXPECT_EQ(policy_content(79.0), 3u);
  EXPECT_EQ(policy_content(100.0), 4u);
  EXPECT_THROW(ContentMapping::parse("0:0,20:2,40:1"), InvalidArgument);
  EXPECT_THROW(ContentMapping::parse("0:0,40:1,20:2"), InvalidArgument);
  EXPECT_EQ(policy_content(50.0, ContentMapping::parse("0:1,50:6")), 4u);
}

TEST(Policies, Roi) {
  const std::vector<Rect> full{{0, 0, 64, 64}};
  const auto all_in = policy_roi(full, 64, 64);
  EXPECT_EQ(all_in.histogram()[0], 64u * 64 + 2 * 32 * 32);
  const auto none = policy_roi({}, 64, 64);
  EXPECT_EQ(none.histogram()[3], 64u * 64 + 2 * 32 * 32);
  const std::vector<Rect> half{{0, 16, 64, 32}};
  const auto h = policy_roi(half, 64, 64);
  std::size_t luma3 = std::count(h.y.begin(), h.y.end(), 3);
  EXPECT_EQ(luma3, 64u * 64 / 2);
  const std::vector<Rect> odd{{3, 3, 1, 1}};
  const auto o = policy_roi(odd, 64, 64);
  EXPECT_EQ(o.u[1 * 32 + 1], 0);
  EXPECT_EQ(std::count(o.u.begin(), o.u.end(), 0), 1);
}

TEST(Policies, RoiParsing) {
  const auto r = parse_roi("# frame x y w h\n0 1 2 3 4\n0 5 6 7 8\n2 0 0 1 1\n");
  EXPECT_EQ(r.rect_count(), 3u);
  EXPECT_EQ(r.rects(0).size(), 2u);
  EXPECT_TRUE(r.rects(1).empty());
  try {
    parse_roi("0 0 0 1 1\n0 0 0 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_roi("0 0 0 -1 1\n"), ParseError);
  EXPECT_THROW(parse_roi("2 0 0 1 1\n1 0 0 1 1\n"), ParseError);
}

TEST(ApplyPolicy, IdentityAndConstant) {
  const auto clip = clip_of({noise_frame(32, 32, 6)});
  const auto d0 = decide_luminance(clip, LuminanceCondition::Normal);
  EXPECT_EQ(apply_policy(clip, d0), clip);

  const auto gray = clip_of({FramePlanar420::filled(32, 32, 0x55, 0x55)});
  const auto out = apply_policy(gray, decide_luminance(gray, LuminanceCondition::Overcast));
  EXPECT_EQ(out, clip_of({FramePlanar420::filled(32, 32, 0x54, 0x54)}));
}

TEST(ApplyPolicy, RoiContainment) {
  const auto clip = clip_of({noise_frame(64, 64, 7), noise_frame(64, 64, 8)});
  RoiSpec roi;
  roi.add(0, {8, 8, 20, 30});
  roi.add(1, {30, 2, 34, 16});
  const auto out = apply_policy(clip, decide_roi(clip, roi));
  for (std::size_t f = 0; f < 2; ++f) {
    const auto r = roi.rects(f)[0];
    for (long y = 0; y < 64; ++y)
      for (long x = 0; x < 64; ++x) {
        const std::uint8_t a = clip.frames[f].y[y * 64 + x], b = out.frames[f].y[y * 64 + x];
        if (x >= r.x && x < r.x + r.w && y >= r.y && y < r.y + r.h) {
          EXPECT_EQ(a, b);
        } else {
          EXPECT_EQ(b, oracle::truncate_low(a, 3, 8) & 0xFF);
        }
      }
  }
}

TEST(ApplyPolicy, Deterministic) {
  const auto clip = clip_of({noise_frame(64, 64, 9), FramePlanar420::filled(64, 64, 10)});
  const SavingsEstimator est;
  const auto d1 = decide_content(clip), d2 = decide_content(clip);
  const auto o1 = apply_policy(clip, d1, 1), o2 = apply_policy(clip, d2, 4);
  EXPECT_EQ(o1, o2);
  EXPECT_EQ(to_json(quality_report(clip, o1, d1, est)), to_json(quality_report(clip, o2, d2, est)));
}

TEST(Metrics, PsnrAndSsimBasics) {
  const auto a = noise_frame(32, 32, 10);
  const auto p = psnr(a, a);
  EXPECT_TRUE(p.identical);
  EXPECT_EQ(p.db, kPsnrCap);
  EXPECT_DOUBLE_EQ(ssim(a, a), 1.0);
  const auto z = FramePlanar420::filled(32, 32, 0), w = FramePlanar420::filled(32, 32, 255);
  EXPECT_NEAR(psnr(z, w).db, 0.0, 1e-12);
  EXPECT_FALSE(psnr(z, w).identical);
}

TEST(Metrics, MatchDirectFormulas) {
  const auto a = noise_frame(48, 40, 11);
  auto b = a;
  for (auto& v : b.y) v = static_cast<std::uint8_t>(oracle::truncate_low(v, 4, 8));
  EXPECT_NEAR(psnr(a, b).db, oracle::psnr(a.y, b.y), 1e-9);
  EXPECT_NEAR(ssim(a, b), oracle::ssim(a.y, b.y, 48, 40), 1e-9);
}

TEST(Metrics, AnalyticPsnrOnUniformNoise) {
  const auto a = noise_frame(256, 256, 12);
  const double expect_db[] = {0, 0, 0, 40.73, 34.81};
  for (unsigned k = 1; k <= 4; ++k) {
    const auto clip = clip_of({a});
    PolicyDecision d;
    d.policy = "uniform";
    d.frames.push_back(FrameTruncationMap::uniform(256, 256, k));
    const auto out = apply_policy(clip, d);
    const auto r = psnr(a, out.frames[0]);
    const double analytic = (std::pow(4.0, k) + 2.0) / 12.0;
    EXPECT_NEAR(r.mse / analytic, 1.0, 0.01) << k;
    if (k >= 3) EXPECT_NEAR(r.db, expect_db[k], 0.10);
  }
}

TEST(Metrics, PsnrDecreasesWithK) {
  const auto clip = clip_of({noise_frame(64, 64, 13)});
  double prev = kPsnrCap + 1;
  for (unsigned k = 0; k <= 8; ++k) {
    PolicyDecision d;
    d.frames.push_back(FrameTruncationMap::uniform(64, 64, k));
    const double db = psnr(clip.frames[0], apply_policy(clip, d).frames[0]).db;
    EXPECT_LT(db, prev) << k;
    prev = db;
  }
}

TEST(Report, SavingsExamples) {
  const SavingsEstimator est;
  const auto clip = clip_of({noise_frame(64, 80, 14)});
  const auto sun = decide_luminance(clip, LuminanceCondition::Sunlight);
  EXPECT_NEAR(quality_report(clip, apply_policy(clip, sun), sun, est).savings_pct, 47.02, 1e-9);
  const auto none = decide_luminance(clip, LuminanceCondition::Normal);
  const auto r0 = quality_report(clip, apply_policy(clip, none), none, est);
  EXPECT_EQ(r0.savings_pct, 0.0);
  EXPECT_EQ(r0.mean_ssim, 1.0);
  EXPECT_TRUE(r0.identical);

  RoiSpec roi;
  roi.add(0, {0, 0, 64, 32});  // 40% of the frame
  const auto d = decide_roi(clip, roi);
  EXPECT_NEAR(quality_report(clip, apply_policy(clip, d), d, est).savings_pct, 0.6 * 34.93, 1e-9);
}

TEST(Report, JsonAndCsvAgree) {
  const SavingsEstimator est;
  const auto clip = clip_of({noise_frame(32, 32, 15), noise_frame(32, 32, 16)});
  const auto d = decide_luminance(clip, LuminanceCondition::Overcast);
  const auto rep = quality_report(clip, apply_policy(clip, d), d, est);
  const auto j = nlohmann::json::parse(to_json(rep));
  std::istringstream csv(to_csv(rep));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "frame,psnr_db,identical,mse,ssim,savings_pct");
  for (std::size_t i = 0; i < 2; ++i) {
    std::getline(csv, line);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_EQ(cells.size(), 6u);
    const auto& jf = j["frames"][i];
    EXPECT_EQ(std::stod(cells[1]), jf["psnr_db"].get<double>());
    EXPECT_EQ(std::stod(cells[3]), jf["mse"].get<double>());
    EXPECT_EQ(std::stod(cells[4]), jf["ssim"].get<double>());
    EXPECT_EQ(std::stod(cells[5]), jf["savings_pct"].get<double>());
  }
}
