#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "doctest.h"
#include "planarmvs/config.hpp"
#include "planarmvs/dataset.hpp"
#include "planarmvs/errors.hpp"
#include "planarmvs/image.hpp"
#include "planarmvs/io_util.hpp"
#include "planarmvs/synthetic.hpp"
#include "test_util.hpp"

using namespace planarmvs;
using namespace planarmvs::test;

TEST_SUITE("image") {
  TEST_CASE("pgm round-trip preserves 8-bit gray exactly") {
    TempDir tmp;
    ImageF img(7, 5);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 7; ++x) img.at(x, y) = static_cast<float>((x * 37 + y * 11) % 256) / 255.0f;
    const std::string path = tmp.path() + "/a.pgm";
    save_pgm(img, path);
    ImageRgb rgb;
    ImageF back = load_image(path, &rgb);
    REQUIRE(back.width() == 7);
    REQUIRE(back.height() == 5);
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 7; ++x) {
        CHECK(back.at(x, y) == doctest::Approx(img.at(x, y)).epsilon(1e-12));
        // PGM replicates gray into all three channels.
        const auto px = rgb.at(x, y);
        CHECK(px[0] == px[1]);
        CHECK(px[1] == px[2]);
      }
  }

  TEST_CASE("ppm round-trip and luma conversion") {
    TempDir tmp;
    ImageRgb img(3, 2);
    img.at(0, 0) = {255, 0, 0};
    img.at(1, 0) = {0, 255, 0};
    img.at(2, 0) = {0, 0, 255};
    img.at(0, 1) = {10, 20, 30};
    img.at(1, 1) = {255, 255, 255};
    img.at(2, 1) = {0, 0, 0};
    const std::string path = tmp.path() + "/a.ppm";
    save_ppm(img, path);
    ImageRgb rgb;
    ImageF gray = load_image(path, &rgb);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 3; ++x) {
        CHECK(rgb.at(x, y) == img.at(x, y));
        const double want =
            (0.299 * img.at(x, y)[0] + 0.587 * img.at(x, y)[1] + 0.114 * img.at(x, y)[2]) / 255.0;
        CHECK(gray.at(x, y) == doctest::Approx(want).epsilon(1e-6));
      }
  }

  TEST_CASE("load_image rejects missing and malformed files") {
    TempDir tmp;
    CHECK_THROWS_AS(load_image(tmp.path() + "/nope.pgm"), IoError);
    const std::string bad = tmp.path() + "/bad.pgm";
    write_file_atomic(bad, "P5\n4 4\n255\nxx");  // truncated payload
    CHECK_THROWS_AS(load_image(bad), IoError);
    const std::string ascii = tmp.path() + "/ascii.pgm";
    write_file_atomic(ascii, "P2\n1 1\n255\n0\n");  // ASCII PGM unsupported
    CHECK_THROWS_AS(load_image(ascii), IoError);
  }

  TEST_CASE("sample_bilinear interpolates exactly") {
    ImageF img(2, 2);
    img.at(0, 0) = 0.0f;
    img.at(1, 0) = 1.0f;
    img.at(0, 1) = 2.0f;
    img.at(1, 1) = 4.0f;
    CHECK(sample_bilinear(img, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(sample_bilinear(img, 1.0, 1.0) == doctest::Approx(4.0));
    CHECK(sample_bilinear(img, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(sample_bilinear(img, 0.0, 0.5) == doctest::Approx(1.0));
    CHECK(sample_bilinear(img, 0.5, 0.5) == doctest::Approx(1.75));
    // (1-fy)((1-fx) I00 + fx I10) + fy((1-fx) I01 + fx I11) at fx=.25, fy=.75
    CHECK(sample_bilinear(img, 0.25, 0.75) == doctest::Approx(1.9375).epsilon(1e-12));
  }

  TEST_CASE("downscale area-averages with edge clamping") {
    ImageF img(4, 2);
    float v = 0.0f;
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 4; ++x) img.at(x, y) = v += 1.0f;  // 1..8
    ImageF half = downscale(img, 2);
    REQUIRE(half.width() == 2);
    REQUIRE(half.height() == 1);
    CHECK(half.at(0, 0) == doctest::Approx((1 + 2 + 5 + 6) / 4.0));
    CHECK(half.at(1, 0) == doctest::Approx((3 + 4 + 7 + 8) / 4.0));
    // factor 1 is the identity.
    ImageF same = downscale(img, 1);
    CHECK(same.at(3, 1) == img.at(3, 1));
    // 5x3 by 2 -> 2x1, right/bottom samples clamp to the last row/column.
    ImageF odd(5, 3, 1.0f);
    odd.at(4, 2) = 9.0f;
    ImageF small = downscale(odd, 2);
    REQUIRE(small.width() == 2);
    REQUIRE(small.height() == 1);
    CHECK(small.at(1, 0) == doctest::Approx(1.0));
  }
}

TEST_SUITE("dataset") {
  TEST_CASE("camera text file round-trip") {
    TempDir tmp;
    std::mt19937_64 rng(99);
    CameraModel cam = make_camera(640, 480, 512.0, 0.25, 12.5);
    cam.R = random_rotation(rng, 1.0);
    cam.t = Eigen::Vector3d(0.125, -3.5, 2.25);
    cam.cx = 319.25;
    cam.cy = 239.75;
    const std::string path = tmp.path() + "/cam.txt";
    save_camera(cam, path);
    CameraModel back = load_camera(path);
    CHECK((back.R - cam.R).norm() < 1e-12);
    CHECK((back.t - cam.t).norm() < 1e-12);
    CHECK(back.fx == doctest::Approx(cam.fx).epsilon(1e-15));
    CHECK(back.fy == doctest::Approx(cam.fy).epsilon(1e-15));
    CHECK(back.cx == doctest::Approx(cam.cx).epsilon(1e-15));
    CHECK(back.cy == doctest::Approx(cam.cy).epsilon(1e-15));
    CHECK(back.depth_min == doctest::Approx(cam.depth_min).epsilon(1e-15));
    CHECK(back.depth_max == doctest::Approx(cam.depth_max).epsilon(1e-15));
    // Loader does not invent image dimensions; they come from the image file.
    CHECK(back.width == 0);
    CHECK(back.height == 0);
  }

  TEST_CASE("camera file errors") {
    TempDir tmp;
    const std::string path = tmp.path() + "/cam.txt";
    write_file_atomic(path, "1 0 0 0 1 0 0 0 1 0 0 0 100 100 32 24\n");  // 16 of 18
    CHECK_THROWS_AS(load_camera(path), IoError);
    write_file_atomic(path,
                      "1 0 0 0 1 0 0 0 1 0 0 0 100 100 32 24 0.5 10 7\n");  // trailing junk
    CHECK_THROWS_AS(load_camera(path), IoError);
    CHECK_THROWS_AS(load_camera(tmp.path() + "/absent.txt"), IoError);
  }

  TEST_CASE("depth map container layout is exact") {
    TempDir tmp;
    DepthMap map(3, 2);
    const float vals[6] = {0.5f, 1.5f, -2.0f, 3.25f, 0.0f, 8.875f};
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 3; ++x) map.at(x, y) = vals[y * 3 + x];
    const std::string path = tmp.path() + "/d.dmap";
    save_depth_map(map, path);

    std::ifstream in(path, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string header = "DMAP1\n3 2\n";
    REQUIRE(data.size() == header.size() + 6 * 4);
    CHECK(data.compare(0, header.size(), header) == 0);
    for (int i = 0; i < 6; ++i) {
      const float f = read_le_float(data.data() + header.size() + 4 * i);
      CHECK(f == vals[i]);  // row-major little-endian float32
    }

    DepthMap back = load_depth_map(path);
    REQUIRE(back.width() == 3);
    REQUIRE(back.height() == 2);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 3; ++x) CHECK(back.at(x, y) == map.at(x, y));
  }

  TEST_CASE("depth map loader rejects corrupt containers") {
    TempDir tmp;
    const std::string path = tmp.path() + "/d.dmap";
    write_file_atomic(path, "DMAP2\n1 1\n\0\0\0\0");
    CHECK_THROWS_AS(load_depth_map(path), IoError);
    write_file_atomic(path, std::string("DMAP1\n2 2\n") + "\0\0\0\0");
    CHECK_THROWS_AS(load_depth_map(path), IoError);  // payload too short
    write_file_atomic(path, "DMAP1\n-1 4\nxxxx");
    CHECK_THROWS_AS(load_depth_map(path), IoError);
    write_file_atomic(path, "DMAP1\n2 x\nxxxx");
    CHECK_THROWS_AS(load_depth_map(path), IoError);
  }

  TEST_CASE("normal map round-trip") {
    TempDir tmp;
    NormalMap map(2, 2);
    map.at(0, 0) = Eigen::Vector3f(0, 0, -1);
    map.at(1, 0) = Eigen::Vector3f(0.5f, -0.25f, 0.125f);
    map.at(0, 1) = Eigen::Vector3f(1, 2, 3);
    map.at(1, 1) = Eigen::Vector3f(-0.0f, 0.75f, -0.5f);
    const std::string path = tmp.path() + "/n.nmap";
    save_normal_map(map, path);
    NormalMap back = load_normal_map(path);
    REQUIRE(back.width() == 2);
    REQUIRE(back.height() == 2);
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 2; ++x) CHECK(back.at(x, y) == map.at(x, y));
  }

  TEST_CASE("scene directory round-trip with ground truth") {
    TempDir tmp;
    SceneDataset scene = render_synthetic_scene(preset_textured(48, 36, 3), 5);
    const std::string dir = tmp.path() + "/scene";
    save_scene(scene, dir);
    SceneDataset back = load_scene(dir);
    REQUIRE(back.view_count() == 3);
    REQUIRE(back.gt_depth.size() == 3);
    for (int v = 0; v < 3; ++v) {
      CHECK((back.cameras[v].R - scene.cameras[v].R).norm() < 1e-12);
      CHECK((back.cameras[v].t - scene.cameras[v].t).norm() < 1e-12);
      CHECK(back.cameras[v].width == 48);
      CHECK(back.cameras[v].height == 36);
      for (int y = 0; y < 36; ++y)
        for (int x = 0; x < 48; ++x) {
          CHECK(back.images[v].at(x, y) == scene.images[v].at(x, y));
          CHECK(back.gt_depth[v].at(x, y) == scene.gt_depth[v].at(x, y));
        }
    }
  }

  TEST_CASE("load_scene validates the directory shape") {
    TempDir tmp;
    CHECK_THROWS_AS(load_scene(tmp.path() + "/missing"), IoError);

    SceneDataset scene = render_synthetic_scene(preset_textured(32, 24, 2), 5);
    const std::string dir = tmp.path() + "/scene";
    save_scene(scene, dir);
    std::filesystem::remove(dir + "/cams/0001.txt");
    CHECK_THROWS_AS(load_scene(dir), IoError);
  }

  TEST_CASE("scene validation catches mismatches") {
    SceneDataset scene = render_synthetic_scene(preset_textured(32, 24, 2), 5);
    CHECK_NOTHROW(scene.validate());
    SceneDataset wrong_dims = scene;
    wrong_dims.cameras[0].width = 16;
    CHECK_THROWS_AS(wrong_dims.validate(), ValidationError);
    SceneDataset one_view = scene;
    one_view.images.pop_back();
    CHECK_THROWS_AS(one_view.validate(), ValidationError);
    SceneDataset bad_range = scene;
    bad_range.cameras[1].depth_min = bad_range.cameras[1].depth_max + 1.0;
    CHECK_THROWS_AS(bad_range.validate(), ValidationError);
  }
}

TEST_SUITE("synthetic") {
  TEST_CASE("rendering is deterministic in the seed") {
    SceneDataset a = render_synthetic_scene(preset_textured(64, 48, 3), 123);
    SceneDataset b = render_synthetic_scene(preset_textured(64, 48, 3), 123);
    SceneDataset c = render_synthetic_scene(preset_textured(64, 48, 3), 124);
    bool all_equal = true, any_diff_seed = false;
    for (int v = 0; v < 3; ++v)
      for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 64; ++x) {
          all_equal &= a.images[v].at(x, y) == b.images[v].at(x, y);
          any_diff_seed |= a.images[v].at(x, y) != c.images[v].at(x, y);
        }
    CHECK(all_equal);
    CHECK(any_diff_seed);
  }

  TEST_CASE("ground truth depths are consistent with the depth range") {
    SceneDataset scene = render_synthetic_scene(preset_textured(96, 72, 5), 7);
    for (int v = 0; v < 5; ++v) {
      const CameraModel &cam = scene.cameras[v];
      int valid = 0;
      for (int y = 0; y < 72; ++y)
        for (int x = 0; x < 96; ++x) {
          const float d = scene.gt_depth[v].at(x, y);
          if (d <= 0.0f) continue;
          ++valid;
          CHECK(d >= cam.depth_min);
          CHECK(d <= cam.depth_max);
        }
      // The backdrop is finite, so edge views have some invalid pixels, but
      // the vast majority of each frame images a surface.
      CHECK(valid > 96 * 72 * 8 / 10);
    }
  }

  TEST_CASE("look_at_camera builds a valid pose looking at the target") {
    CameraModel cam = look_at_camera({1.0, -2.0, 0.5}, {0.0, 0.0, 5.0}, {0.0, 1.0, 0.0}, 100.0,
                                     100.0, 64, 48);
    cam.depth_min = 0.1;
    cam.depth_max = 100.0;
    CHECK_NOTHROW(cam.validate());
    const Eigen::Vector2d px = cam.project(Eigen::Vector3d(0.0, 0.0, 5.0));
    CHECK(px.x() == doctest::Approx(cam.cx).epsilon(1e-9));
    CHECK(px.y() == doctest::Approx(cam.cy).epsilon(1e-9));
    CHECK_THROWS_AS(look_at_camera({0, 0, 0}, {0, 1, 0}, {0, 1, 0}, 100, 100, 64, 48),
                    ValidationError);
  }

  TEST_CASE("lowtex preset carves a uniform central window") {
    SceneDataset scene = render_synthetic_scene(preset_lowtex(96, 72, 3), 3);
    // Count pixels whose 8-neighborhood is perfectly flat; the windowed wall
    // must produce a large untextured region (criterion for the prior tests).
    const ImageF &img = scene.images[1];
    int flat = 0;
    for (int y = 1; y < 71; ++y)
      for (int x = 1; x < 95; ++x) {
        bool same = true;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) same &= img.at(x + dx, y + dy) == img.at(x, y);
        flat += same;
      }
    CHECK(flat > 96 * 72 / 5);
  }

  TEST_CASE("renderer rejects degenerate requests") {
    SceneGeometry geo = preset_textured(32, 24, 2);
    geo.planes.clear();
    CHECK_THROWS_AS(render_synthetic_scene(geo, 1), ValidationError);
    SceneGeometry one_cam = preset_textured(32, 24, 2);
    one_cam.cameras.resize(1);
    CHECK_THROWS_AS(render_synthetic_scene(one_cam, 1), ValidationError);
    // A camera looking away from every plane has no hits.
    SceneGeometry away = preset_textured(32, 24, 2);
    away.cameras[0] = look_at_camera({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 28.8, 28.8, 32, 24);
    CHECK_THROWS_AS(render_synthetic_scene(away, 1), ValidationError);
  }
}

TEST_SUITE("config") {
  TEST_CASE("defaults validate and round-trip through text") {
    PipelineConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    TempDir tmp;
    const std::string path = tmp.path() + "/cfg.txt";
    cfg.alpha = 0.25;
    cfg.top_k = 3;
    cfg.use_prior = false;
    write_file_atomic(path, config_to_text(cfg));
    PipelineConfig back = load_config(path);
    CHECK(back.alpha == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(back.top_k == 3);
    CHECK(back.use_prior == false);
    CHECK(back.sigma == doctest::Approx(cfg.sigma).epsilon(1e-15));
    CHECK(back.geom_rounds == cfg.geom_rounds);
  }

  TEST_CASE("parser handles comments, blanks, and reports line numbers") {
    PipelineConfig cfg = parse_config(
        "# comment\n"
        "\n"
        "alpha = 0.5\n"
        "  top_k =2   \n"
        "use_geom = false\n");
    CHECK(cfg.alpha == doctest::Approx(0.5));
    CHECK(cfg.top_k == 2);
    CHECK(cfg.use_geom == false);

    CHECK_THROWS_WITH_AS(parse_config("alpha = 0.5\nbogus_key = 1\n"),
                         doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha 0.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("alpha = banana\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("top_k = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("use_prior = maybe\n"), ConfigError);
  }

  TEST_CASE("validate rejects out-of-range settings") {
    auto expect_bad = [](auto mutate) {
      PipelineConfig cfg;
      mutate(cfg);
      CHECK_THROWS_AS(cfg.validate(), ConfigError);
    };
    expect_bad([](PipelineConfig &c) { c.alpha = 0.0; });
    expect_bad([](PipelineConfig &c) { c.eta = 1.0; });
    expect_bad([](PipelineConfig &c) { c.eta = 0.0; });
    expect_bad([](PipelineConfig &c) { c.top_k = 0; });
    expect_bad([](PipelineConfig &c) { c.patch_radius = 0; });
    expect_bad([](PipelineConfig &c) { c.patch_step = 0; });
    expect_bad([](PipelineConfig &c) {
      c.patch_radius = 1;
      c.patch_step = 3;  // 1x1 window: below the 9-sample minimum
    });
    expect_bad([](PipelineConfig &c) { c.t_photo = 0; });
    expect_bad([](PipelineConfig &c) { c.t_geo = -1; });
    expect_bad([](PipelineConfig &c) { c.geom_rounds = 0; });
    expect_bad([](PipelineConfig &c) { c.fusion.min_consistent = 0; });
    expect_bad([](PipelineConfig &c) { c.lambda_geo = -0.5; });
    expect_bad([](PipelineConfig &c) { c.threads = -1; });
  }

  TEST_CASE("resolved_threads maps zero to the hardware count") {
    PipelineConfig cfg;
    cfg.threads = 3;
    CHECK(cfg.resolved_threads() == 3);
    cfg.threads = 0;
    CHECK(cfg.resolved_threads() >= 1);
  }
}
