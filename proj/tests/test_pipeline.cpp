#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <fstream>

#include "fragscan/pipeline.hpp"
#include "fragscan/png_io.hpp"
#include "fragscan/synthetic.hpp"
#include "helpers.hpp"

using namespace fragscan;
using testutil::Rng;

TEST_CASE("postprocess recovers every synthetic particle") {
  const auto spec = random_scene_spec(1024, 1024, 12, 10, 45, 2, 777);
  const auto scene = generate_synthetic_scene(spec);
  PipelineConfig cfg;
  const auto result = run_postprocess(scene.mask, cfg);
  REQUIRE(result.fragments.size() == scene.truth.size());

  // Match recovered fragments to the nearest truth centroid.
  for (const auto& f : result.fragments) {
    const Fragment* best = nullptr;
    double best_d2 = 1e18;
    for (const auto& t : scene.truth) {
      const double dx = f.centroid_x - t.centroid_x, dy = f.centroid_y - t.centroid_y;
      if (dx * dx + dy * dy < best_d2) {
        best_d2 = dx * dx + dy * dy;
        best = &t;
      }
    }
    REQUIRE(best != nullptr);
    REQUIRE(best_d2 < 9.0);
    REQUIRE(f.d == doctest::Approx(best->d).epsilon(0.03));
    REQUIRE(f.a == doctest::Approx(best->a).epsilon(0.04));
    REQUIRE(f.b == doctest::Approx(best->b).epsilon(0.04));
  }
}

TEST_CASE("postprocess is deterministic") {
  const auto scene = generate_synthetic_scene(random_scene_spec(512, 512, 6, 10, 30, 2, 31));
  PipelineConfig cfg;
  const auto a = run_postprocess(scene.mask, cfg);
  const auto b = run_postprocess(scene.mask, cfg);
  CHECK(a.instances.ids == b.instances.ids);
  REQUIRE(a.fragments.size() == b.fragments.size());
  for (std::size_t i = 0; i < a.fragments.size(); ++i) {
    CHECK(a.fragments[i].d == b.fragments[i].d);
    CHECK(a.fragments[i].volume == b.fragments[i].volume);
  }
}

TEST_CASE("postprocess of an empty mask yields no fragments") {
  PipelineConfig cfg;
  const auto result = run_postprocess(ClassMask(64, 64, kBackground), cfg);
  CHECK(result.fragments.empty());
  CHECK(result.instances.instance_count == 0);
  for (auto id : result.instances.ids.v) REQUIRE(id == 0);
}

TEST_CASE("postprocess rejects masks with alien labels and bad configs") {
  ClassMask bad(8, 8, kBackground);
  bad.v[5] = 7;
  PipelineConfig cfg;
  CHECK_THROWS_AS(run_postprocess(bad, cfg), IoError);
  cfg.max_radius = -1;
  CHECK_THROWS_AS(run_postprocess(ClassMask(8, 8, kBackground), cfg), std::invalid_argument);
}

TEST_CASE("the fine-particle cut removes small instances end to end") {
  SyntheticSceneSpec spec;
  spec.width = 256;
  spec.height = 256;
  spec.ellipses.push_back({60, 60, 3.0, 3.0, 0.0, 1});    // d ~ 5.4 px, excluded
  spec.ellipses.push_back({160, 160, 30.0, 25.0, 0.3, 2});  // retained
  const auto scene = generate_synthetic_scene(spec);
  PipelineConfig cfg;
  cfg.se_half = 0;  // keep the tiny particle until the diameter cut
  const auto result = run_postprocess(scene.mask, cfg);
  REQUIRE(result.fragments.size() == 1);
  CHECK(result.fragments[0].id == 1);
  CHECK(result.fragments[0].d == doctest::Approx(scene.truth[1].d).epsilon(0.03));

  cfg.min_diameter_px = 0.0;
  CHECK(run_postprocess(scene.mask, cfg).fragments.size() == 2);
}

TEST_CASE("border fragment policy") {
  std::vector<Fragment> fragments(3);
  fragments[1].touches_border = true;
  PipelineConfig cfg;
  CHECK(apply_border_policy(fragments, cfg).size() == 3);
  cfg.include_border_fragments = false;
  CHECK(apply_border_policy(fragments, cfg).size() == 2);
}

TEST_CASE("identical sections produce unit ratios and zero slopes") {
  const auto scene = generate_synthetic_scene(random_scene_spec(900, 900, 15, 10, 40, 2, 99));
  PipelineConfig cfg;
  const auto fragments = run_postprocess(scene.mask, cfg).fragments;
  REQUIRE(fragments.size() > 2);

  std::vector<ImageFragments> images;
  std::vector<SectionMapEntry> map;
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 2; ++i) {
      const std::string id = "img_" + std::to_string(s) + "_" + std::to_string(i);
      images.push_back({id, fragments});
      map.push_back({id, "S" + std::to_string(s + 1), s * 12.0, (s + 1) * 12.0});
    }
  const auto result = run_sections(images, map, cfg);
  REQUIRE(result.sections.size() == 4);
  CHECK(result.sections[0].section_id == "S1");
  CHECK(result.sections[3].section_id == "S4");
  for (const auto& r : result.segregation.ratios) {
    CHECK(r.r10 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.r50 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.r90 == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(result.segregation.fit10.slope == doctest::Approx(0.0));
  CHECK(result.segregation.fit90.slope == doctest::Approx(0.0));
}

TEST_CASE("sections results equal a direct module-level recomputation") {
  Rng rng(501);
  PipelineConfig cfg;
  std::vector<ImageFragments> images;
  std::vector<SectionMapEntry> map;
  std::vector<Fragment> pooled;
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 3; ++i) {
      std::vector<Fragment> fragments;
      for (int n = 0; n < 120; ++n) {
        Fragment f;
        f.d = rng.uniform(1.0 + 6 * s, 20.0 + 25 * s);
        f.volume = f.d * f.d * f.d * 0.3;
        fragments.push_back(f);
      }
      const std::string id = "im" + std::to_string(s) + std::to_string(i);
      images.push_back({id, fragments});
      map.push_back({id, "S" + std::to_string(s + 1), s * 12.0, (s + 1) * 12.0});
      pooled.insert(pooled.end(), fragments.begin(), fragments.end());
    }
  const auto result = run_sections(images, map, cfg);

  const auto [odist, overall] = pool_overall(pooled, cfg.volume_bin_cm);
  CHECK(result.overall.d10 == doctest::Approx(overall.d10).epsilon(1e-12));
  CHECK(result.overall.d50 == doctest::Approx(overall.d50).epsilon(1e-12));
  CHECK(result.overall.d90 == doctest::Approx(overall.d90).epsilon(1e-12));

  for (int s = 0; s < 3; ++s) {
    std::vector<CharacteristicDiameters> cds;
    for (int i = 0; i < 3; ++i)
      cds.push_back(
          characteristic_diameters(psd(images[s * 3 + i].fragments, PsdMode::volume, 0.8)));
    const auto expect = section_report(cds, "S" + std::to_string(s + 1), {0, 0});
    CHECK(result.sections[s].mean.d50 == doctest::Approx(expect.mean.d50).epsilon(1e-12));
    CHECK(result.sections[s].ci50.low == doctest::Approx(expect.ci50.low).epsilon(1e-12));
    const auto ratios = relative_diameters(expect.mean, overall);
    CHECK(result.segregation.ratios[s].r50 == doctest::Approx(ratios[1]).epsilon(1e-12));
  }
}

TEST_CASE("sections reject sparse inputs") {
  PipelineConfig cfg;
  std::vector<Fragment> one(3);
  for (auto& f : one) {
    f.d = 5;
    f.volume = 10;
  }
  std::vector<ImageFragments> images{{"a", one}, {"b", one}};
  std::vector<SectionMapEntry> map{{"a", "S1", 0, 12}, {"b", "S2", 12, 24}};
  CHECK_THROWS_AS(run_sections(images, map, cfg), IoError);  // one image per section

  std::vector<ImageFragments> unmapped{{"zz", one}};
  CHECK_THROWS_AS(run_sections(unmapped, map, cfg), IoError);
}

TEST_CASE("the bundled reference values reproduce the published segregation trend") {
  std::ifstream in(std::string(FRAGSCAN_DATA_DIR) + "/segregation_reference.json");
  REQUIRE(in.good());
  nlohmann::json ref;
  in >> ref;

  std::vector<SectionReport> sections;
  for (const auto& s : ref["sections"]) {
    SectionReport r;
    r.section_id = s["section_id"];
    r.depth_range_m = {s["depth_range_m"][0], s["depth_range_m"][1]};
    r.mean = {s["mean"]["d10"], s["mean"]["d50"], s["mean"]["d90"]};
    r.per_image = {r.mean, r.mean};
    sections.push_back(r);
  }
  const CharacteristicDiameters overall{ref["overall"]["d10"], ref["overall"]["d50"],
                                        ref["overall"]["d90"]};
  const auto seg = build_segregation(sections, overall);

  const double tol = ref["expected"]["tolerance"];
  CHECK(std::fabs(seg.fit10.slope - ref["expected"]["ratio_slopes"]["r10"].get<double>()) <= tol);
  CHECK(std::fabs(seg.fit90.slope - ref["expected"]["ratio_slopes"]["r90"].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.front().r10 -
                  ref["expected"]["ratio_endpoints"]["r10"][0].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.back().r10 -
                  ref["expected"]["ratio_endpoints"]["r10"][1].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.front().r50 -
                  ref["expected"]["ratio_endpoints"]["r50"][0].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.back().r50 -
                  ref["expected"]["ratio_endpoints"]["r50"][1].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.front().r90 -
                  ref["expected"]["ratio_endpoints"]["r90"][0].get<double>()) <= tol);
  CHECK(std::fabs(seg.ratios.back().r90 -
                  ref["expected"]["ratio_endpoints"]["r90"][1].get<double>()) <= tol);
}
