#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "salient/error.hpp"
#include "salient/image_io.hpp"
#include "salient/render.hpp"
#include "salient/saliency.hpp"
#include "tempdir.hpp"

using namespace salient;

namespace {

SaliencyMap make_map(Tensor scores, Head head = Head::actor) {
  SaliencyMap m;
  m.grid_scores = scores;
  m.scores = std::move(scores);
  m.head = head;
  return m;
}

Tensor ramp() {
  Tensor t({80, 80});
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(i % 97) / 96.0f;
  return t;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("overlay channels") {
  const Frame frame(ramp());
  const OverlayConfig cfg;
  const RgbImage plain = overlay(frame, nullptr, nullptr, cfg, {});
  CHECK(plain.red == frame.pixels());
  CHECK(plain.green == frame.pixels());
  CHECK(plain.blue == frame.pixels());

  const SaliencyMap zero = make_map(Tensor({80, 80}));
  const RgbImage zeros = overlay(frame, &zero, &zero, cfg, resolve_scales({zero}, {zero}, cfg.normalization));
  CHECK(zeros.blue == frame.pixels());
  CHECK(zeros.red == frame.pixels());

  Tensor hot({80, 80});
  hot.at(10, 10) = 2.0f;
  hot.at(20, 30) = 1.0f;
  const SaliencyMap actor = make_map(hot);
  const OverlayScales scales = resolve_scales({actor}, {}, cfg.normalization);
  CHECK(scales.actor == 2.0);
  const RgbImage a = overlay(Frame(), &actor, nullptr, cfg, scales);
  CHECK(a.blue.at(10, 10) == 1.0f);
  CHECK(a.blue.at(20, 30) == 0.5f);
  CHECK(a.red == Tensor({80, 80}));
  CHECK(a.green == Tensor({80, 80}));

  const SaliencyMap critic = make_map(hot, Head::critic);
  const RgbImage c = overlay(frame, nullptr, &critic, cfg, resolve_scales({}, {critic}, cfg.normalization));
  CHECK(c.blue == frame.pixels());
  CHECK(c.green == frame.pixels());
  CHECK(c.red.at(10, 10) == 1.0f);

  OverlayConfig loud;
  loud.intensity_gain = 1e6;
  const RgbImage sat = overlay(frame, &actor, nullptr, loud, scales);
  CHECK(sat.blue.max_value() == 1.0f);
  CHECK(sat.blue.all_finite());

  const SaliencyMap wrong = make_map(Tensor({16, 16}));
  CHECK_THROWS_AS(overlay(frame, &wrong, nullptr, cfg, scales), ParameterError);
}

TEST_CASE("normalization") {
  CHECK(parse_normalization("episode-max").kind == Normalization::Kind::per_episode_max);
  const Normalization fixed = parse_normalization("fixed:0.25");
  CHECK(fixed.kind == Normalization::Kind::fixed_scale);
  CHECK(fixed.scale == 0.25);
  CHECK(normalization_string(fixed) == "fixed:0.25");
  CHECK_THROWS_AS(parse_normalization("fixed:-1"), ConfigError);
  CHECK_THROWS_AS(parse_normalization("loudest"), ConfigError);

  // The episode maximum reaches exactly the gain.
  Tensor a({80, 80}, 0.1f), b({80, 80}, 0.2f);
  b.at(5, 5) = 0.8f;
  const SaliencyMap ma = make_map(a), mb = make_map(b);
  OverlayConfig cfg;
  cfg.intensity_gain = 0.5;
  const OverlayScales s = resolve_scales({ma, mb}, {}, cfg.normalization);
  const RgbImage img = overlay(Frame(), &mb, nullptr, cfg, s);
  CHECK(img.blue.at(5, 5) == 0.5f);
  CHECK(img.blue.max_value() == 0.5f);
}

TEST_CASE("region mass") {
  const SaliencyMap uniform = make_map(Tensor({80, 80}, 0.3f));
  CHECK(region_mass(uniform, parse_region("0:40,0:80")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(region_mass(uniform, parse_region("0:80,0:80")) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(region_mass(make_map(Tensor({80, 80})), parse_region("0:80,0:80")) == 0.0);
  const SaliencyMap r = make_map(ramp());
  CHECK(region_mass(r, parse_region("0:80,0:80")) == doctest::Approx(1.0).epsilon(1e-12));
  const RegionSpec band = parse_region("0:16,0:80");
  CHECK(band.row_end == 16);
  CHECK(band.col_end == 80);
  CHECK_THROWS_AS(parse_region("0:90,0:80"), ConfigError);
  CHECK_THROWS_AS(parse_region("10:5,0:80"), ConfigError);
  CHECK_THROWS_AS(parse_region("rows"), ConfigError);
}

TEST_CASE("writing frames and series") {
  testing::TempDir dir("render");
  const SaliencyMap actor = make_map(ramp());
  const Frame frame(ramp());
  const RgbImage rgb = overlay(frame, &actor, nullptr, OverlayConfig{}, {1.0, 0.0});
  const Image8 img = to_image8(rgb);
  write_frames({img, img}, dir / "a", 3);
  write_frames({img, img}, dir / "b", 3);
  CHECK(std::filesystem::exists(dir / "a" / "overlay_000004.png"));
  CHECK(slurp(dir / "a" / "overlay_000003.png") == slurp(dir / "b" / "overlay_000003.png"));
  const Image8 back = read_png(dir / "a" / "overlay_000003.png");
  REQUIRE(back.channels == 3);
  for (std::size_t r = 0; r < 80; ++r)
    for (std::size_t c = 0; c < 80; ++c) {
      CHECK(std::abs(back.at(r, c, 0) / 255.0 - rgb.red.at(r, c)) <= 1.0 / 255);
      CHECK(std::abs(back.at(r, c, 2) / 255.0 - rgb.blue.at(r, c)) <= 1.0 / 255);
    }
  CHECK(to_image8(rgb, 3).width == 240);

  Series s;
  s.names = {"x", "y"};
  s.columns = {{1.0, 2.0, 3.0}, {0.5, 0.25, 0.125}};
  s.t = {0, 1, 2};
  write_series(s, dir / "s.csv");
  std::ifstream in(dir / "s.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "t,x,y");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);

  CHECK_THROWS_AS(write_series(s, "/proc/nonexistent/s.csv"), IoError);
  CHECK_THROWS_AS(write_frames({img}, "/proc/nonexistent/frames"), IoError);
}
