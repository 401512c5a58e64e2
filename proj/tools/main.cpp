#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "fragscan/csv.hpp"
#include "fragscan/pipeline.hpp"
#include "fragscan/png_io.hpp"
#include "fragscan/report.hpp"
#include "fragscan/synthetic.hpp"

namespace fs = std::filesystem;
using namespace fragscan;

namespace {

struct ConfigCli {
  std::optional<std::string> config_path;
  std::optional<double> cm_per_pixel, min_diameter_px, count_bin_cm, volume_bin_cm, below_cm,
      above_cm;
  std::optional<int> window, stride, se_half, max_radius;
  std::optional<std::string> section_map;
  bool exclude_border = false;
  std::optional<int> carafe_sigma, carafe_k_up, carafe_k_encoder, carafe_c_m;
  std::optional<std::string> carafe_normalizer;
  std::optional<bool> ghost_rectify;
};

void add_config_flags(CLI::App* cmd, ConfigCli& c) {
  cmd->add_option("--config", c.config_path,
                  "key = value config file (default: $FRAGSCAN_CONFIG if set)");
  cmd->add_option("--cm-per-pixel", c.cm_per_pixel, "calibration, centimeters per pixel");
  cmd->add_option("--window", c.window, "tile window size in pixels");
  cmd->add_option("--stride", c.stride, "tile stride in pixels");
  cmd->add_option("--se-half", c.se_half, "half width of the opening element (4 => 9x9)");
  cmd->add_option("--max-radius", c.max_radius, "region expansion radius in pixels");
  cmd->add_option("--min-diameter-px", c.min_diameter_px,
                  "exclude fragments with pixel diameter at or below this");
  cmd->add_option("--count-bin-cm", c.count_bin_cm, "histogram bin width for count PSD");
  cmd->add_option("--volume-bin-cm", c.volume_bin_cm, "histogram bin width for volume PSD");
  cmd->add_option("--below-cm", c.below_cm, "lower count-summary threshold");
  cmd->add_option("--above-cm", c.above_cm, "upper count-summary threshold");
  cmd->add_option("--section-map", c.section_map, "image -> section assignment file");
  cmd->add_flag("--exclude-border-fragments", c.exclude_border,
                "drop fragments touching the image border from statistics");
  cmd->add_option("--carafe-sigma", c.carafe_sigma, "upsample ratio for the kernel operators");
  cmd->add_option("--carafe-k-up", c.carafe_k_up, "reassembly kernel size (odd)");
  cmd->add_option("--carafe-k-encoder", c.carafe_k_encoder, "encoder kernel size (odd)");
  cmd->add_option("--carafe-c-m", c.carafe_c_m, "compressed channel count");
  cmd->add_option("--carafe-normalizer", c.carafe_normalizer, "sigmoid or softmax");
  cmd->add_option("--ghost-rectify", c.ghost_rectify, "rectify ghost block stages (1/0)");
}

PipelineConfig resolve_config(const ConfigCli& c) {
  PipelineConfig cfg;
  std::string path;
  if (c.config_path) {
    path = *c.config_path;
  } else if (const char* env = std::getenv("FRAGSCAN_CONFIG")) {
    path = env;
  }
  if (!path.empty()) cfg = load_config(path);
  if (c.cm_per_pixel) cfg.cm_per_pixel = *c.cm_per_pixel;
  if (c.window) cfg.window = *c.window;
  if (c.stride) cfg.stride = *c.stride;
  if (c.se_half) cfg.se_half = *c.se_half;
  if (c.max_radius) cfg.max_radius = *c.max_radius;
  if (c.min_diameter_px) cfg.min_diameter_px = *c.min_diameter_px;
  if (c.count_bin_cm) cfg.count_bin_cm = *c.count_bin_cm;
  if (c.volume_bin_cm) cfg.volume_bin_cm = *c.volume_bin_cm;
  if (c.below_cm) cfg.below_cm = *c.below_cm;
  if (c.above_cm) cfg.above_cm = *c.above_cm;
  if (c.section_map) cfg.section_map = *c.section_map;
  if (c.exclude_border) cfg.include_border_fragments = false;
  if (c.carafe_sigma) cfg.carafe.sigma = *c.carafe_sigma;
  if (c.carafe_k_up) cfg.carafe.k_up = *c.carafe_k_up;
  if (c.carafe_k_encoder) cfg.carafe.k_encoder = *c.carafe_k_encoder;
  if (c.carafe_c_m) cfg.carafe.c_m = *c.carafe_c_m;
  if (c.carafe_normalizer) apply_config_entry(cfg, "carafe_normalizer", *c.carafe_normalizer);
  if (c.ghost_rectify) cfg.ghost_rectify = *c.ghost_rectify;
  cfg.validate();
  return cfg;
}

std::string tile_name(Pixel origin) {
  return "tile_x" + std::to_string(origin.x) + "_y" + std::to_string(origin.y) + ".png";
}

nlohmann::json layout_to_json(const TileLayout& layout) {
  nlohmann::json origins = nlohmann::json::array();
  for (const auto& o : layout.origins) origins.push_back({o.x, o.y});
  return {{"window", layout.window},
          {"stride", layout.stride},
          {"source_width", layout.source_width},
          {"source_height", layout.source_height},
          {"padded_width", layout.padded_width},
          {"padded_height", layout.padded_height},
          {"origins", std::move(origins)}};
}

TileLayout layout_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open layout " + path);
  nlohmann::json j;
  try {
    in >> j;
    TileLayout layout;
    layout.window = j.at("window").get<int>();
    layout.stride = j.at("stride").get<int>();
    layout.source_width = j.at("source_width").get<int>();
    layout.source_height = j.at("source_height").get<int>();
    layout.padded_width = j.at("padded_width").get<int>();
    layout.padded_height = j.at("padded_height").get<int>();
    for (const auto& o : j.at("origins")) layout.origins.push_back({o.at(0), o.at(1)});
    return layout;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": malformed layout file (" + e.what() + ")");
  }
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// ---- subcommand bodies ------------------------------------------------

int cmd_tile(const std::string& input, const std::string& out_dir, bool gray,
             const PipelineConfig& cfg) {
  fs::create_directories(out_dir);
  int width, height;
  std::optional<GrayImage> img;
  std::optional<ClassMask> mask;
  if (gray) {
    img = read_gray_png(input);
    width = img->width;
    height = img->height;
  } else {
    mask = read_mask_png(input);
    width = mask->width;
    height = mask->height;
  }
  const auto layout = plan_tiles(width, height, cfg.window, cfg.stride);
  for (const auto& origin : layout.origins) {
    const auto path = (fs::path(out_dir) / tile_name(origin)).string();
    if (gray)
      write_gray_png(path, extract_tile(*img, origin, layout));
    else
      write_mask_png(path, extract_tile(*mask, origin, layout));
  }
  write_json((fs::path(out_dir) / "layout.json").string(), layout_to_json(layout));
  std::cout << layout.origins.size() << " tiles (" << layout.cols() << " x " << layout.rows()
            << ") written to " << out_dir << "\n";
  return 0;
}

int cmd_stitch(const std::string& tile_dir, const std::string& layout_path,
               const std::string& out_path) {
  const auto layout = layout_from_json(layout_path);
  std::vector<std::pair<Pixel, ClassMask>> tiles;
  tiles.reserve(layout.origins.size());
  for (const auto& origin : layout.origins) {
    const auto path = fs::path(tile_dir) / tile_name(origin);
    if (!fs::exists(path))
      throw IoError("missing tile at origin (" + std::to_string(origin.x) + ", " +
                    std::to_string(origin.y) + "): " + path.string());
    tiles.emplace_back(origin, read_mask_png(path.string()));
  }
  ClassMask stitched;
  try {
    stitched = stitch(tiles, layout, layout.source_width, layout.source_height);
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  write_mask_png(out_path, stitched);
  std::cout << "stitched " << tiles.size() << " tiles -> " << out_path << "\n";
  return 0;
}

int cmd_postprocess(const std::string& mask_path, const std::string& out_instances,
                    const std::string& out_csv, const std::string& image_id,
                    const PipelineConfig& cfg) {
  const auto mask = read_mask_png(mask_path);
  const auto result = run_postprocess(mask, cfg);
  if (!out_instances.empty()) write_instance_png(out_instances, result.instances);
  if (!out_csv.empty())
    write_fragment_csv(out_csv, image_id.empty() ? stem_of(mask_path) : image_id,
                       result.fragments);
  std::cout << result.fragments.size() << " fragments\n";
  return 0;
}

int cmd_measure(const std::string& instances_path, const std::string& out_csv,
                const std::string& image_id, const PipelineConfig& cfg) {
  const auto instances = read_instance_png(instances_path);
  const auto fragments = measure(instances, Calibration{cfg.cm_per_pixel});
  write_fragment_csv(out_csv, image_id.empty() ? stem_of(instances_path) : image_id, fragments);
  std::cout << fragments.size() << " fragments -> " << out_csv << "\n";
  return 0;
}

std::map<std::string, std::vector<Fragment>> group_by_image(const std::vector<std::string>& csvs) {
  std::map<std::string, std::vector<Fragment>> images;
  for (const auto& path : csvs)
    for (auto& rec : read_fragment_csv(path))
      images[rec.image_id].push_back(rec.fragment);
  return images;
}

int cmd_psd(const std::vector<std::string>& csvs, const std::string& out_dir,
            const PipelineConfig& cfg) {
  fs::create_directories(out_dir);
  for (const auto& [image_id, all_fragments] : group_by_image(csvs)) {
    const auto fragments = apply_border_policy(all_fragments, cfg);
    if (fragments.empty()) throw IoError("psd: image '" + image_id + "' has no fragments");
    const auto count_dist = psd(fragments, PsdMode::count, cfg.count_bin_cm);
    const auto volume_dist = psd(fragments, PsdMode::volume, cfg.volume_bin_cm);
    const auto cd = characteristic_diameters(volume_dist);
    const auto summary = count_summary(fragments, cfg.below_cm, cfg.above_cm);

    nlohmann::json j{{"image_id", image_id},
                     {"count", to_json(count_dist)},
                     {"volume", to_json(volume_dist)},
                     {"characteristic_diameters", to_json(cd)},
                     {"count_summary", to_json(summary)}};
    const auto base = (fs::path(out_dir) / image_id).string();
    write_json(base + "_psd.json", j);
    write_psd_chart(base + "_count.svg", count_dist, image_id + " (by count)");
    write_psd_chart(base + "_volume.svg", volume_dist, image_id + " (by volume)");
    std::cout << image_id << ": n=" << fragments.size() << " d50=" << fmt6(cd.d50) << " cm\n";
  }
  return 0;
}

int cmd_sections(const std::vector<std::string>& csvs, const std::string& out_dir,
                 const PipelineConfig& cfg) {
  if (cfg.section_map.empty())
    throw std::invalid_argument("sections: --section-map (or config section_map) is required");
  const auto section_map = load_section_map(cfg.section_map);
  fs::create_directories(out_dir);

  std::vector<ImageFragments> images;
  for (auto& [image_id, fragments] : group_by_image(csvs))
    images.push_back({image_id, std::move(fragments)});

  const auto result = run_sections(images, section_map, cfg);

  nlohmann::json sections_json = nlohmann::json::array();
  for (const auto& s : result.sections) sections_json.push_back(to_json(s));
  write_json((fs::path(out_dir) / "sections.json").string(), sections_json);
  write_json((fs::path(out_dir) / "segregation.json").string(), to_json(result.segregation));

  for (const auto& img : images) {
    const auto fragments = apply_border_policy(img.fragments, cfg);
    const auto dist = psd(fragments, PsdMode::volume, cfg.volume_bin_cm);
    write_psd_chart((fs::path(out_dir) / ("psd_" + img.image_id + ".svg")).string(), dist,
                    img.image_id + " (by volume)");
  }
  write_psd_chart((fs::path(out_dir) / "psd_overall.svg").string(), result.overall_dist,
                  "overall (by volume)");
  write_section_ci_chart((fs::path(out_dir) / "sections_ci.svg").string(), result.sections);
  write_ratio_fit_chart((fs::path(out_dir) / "ratios_fit.svg").string(), result.segregation);

  std::cout << "overall d'10/d'50/d'90 = " << fmt6(result.overall.d10) << "/"
            << fmt6(result.overall.d50) << "/" << fmt6(result.overall.d90) << " cm\n"
            << "ratio slopes: r10 " << fmt6(result.segregation.fit10.slope) << ", r50 "
            << fmt6(result.segregation.fit50.slope) << ", r90 "
            << fmt6(result.segregation.fit90.slope) << "\n";
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path,
             const std::string& out_json) {
  const auto pred = read_mask_png(pred_path);
  const auto truth = read_mask_png(truth_path);
  ConfusionMatrix cm;
  try {
    cm = confusion(pred, truth);
  } catch (const std::invalid_argument& e) {
    throw IoError(e.what());
  }
  const auto rep = metrics(cm);
  if (!out_json.empty()) write_json(out_json, to_json(rep));
  std::cout << metrics_table(rep);
  return 0;
}

int cmd_synth(const std::string& out_mask, const std::string& out_truth, int width, int height,
              int count, double a_min, double a_max, int band, std::uint64_t seed,
              const PipelineConfig& cfg) {
  SyntheticSceneSpec spec;
  try {
    spec = random_scene_spec(width, height, count, a_min, a_max, band, seed);
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError("synth", e.what());
  }
  auto scene = generate_synthetic_scene(spec);
  write_mask_png(out_mask, scene.mask);
  if (!out_truth.empty()) {
    // Scale the pixel-unit truth into calibrated units for the CSV.
    const double cpp = cfg.cm_per_pixel;
    for (auto& f : scene.truth) {
      f.a *= cpp;
      f.b *= cpp;
      f.d *= cpp;
      f.volume *= cpp * cpp * cpp;
    }
    write_fragment_csv(out_truth, stem_of(out_mask), scene.truth);
  }
  std::cout << scene.truth.size() << " particles -> " << out_mask << "\n";
  return 0;
}

int cmd_kernels_selftest() {
  const auto results = kernels_selftest();
  int failures = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "\n";
    failures += r.pass ? 0 : 1;
  }
  std::cout << (results.size() - failures) << "/" << results.size() << " checks passed\n";
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragscan: rock fragment segmentation post-processing and size statistics"};
  app.require_subcommand(1);

  // tile
  auto* tile = app.add_subcommand("tile", "cut an image or mask into overlapping tiles");
  std::string tile_input, tile_out_dir = "tiles";
  bool tile_gray = false;
  ConfigCli tile_cfg;
  tile->add_option("input", tile_input, "input PNG")->required();
  tile->add_option("-o,--out-dir", tile_out_dir, "output tile directory");
  tile->add_flag("--gray", tile_gray, "treat input as a grayscale image, not a class mask");
  add_config_flags(tile, tile_cfg);

  // stitch
  auto* stitch_cmd = app.add_subcommand("stitch", "fuse predicted tile masks into one mask");
  std::string stitch_dir, stitch_layout, stitch_out = "stitched.png";
  stitch_cmd->add_option("tiles", stitch_dir, "directory of tile masks")->required();
  stitch_cmd->add_option("-l,--layout", stitch_layout, "layout.json from the tile step")
      ->required();
  stitch_cmd->add_option("-o,--out", stitch_out, "output mask PNG");

  // postprocess
  auto* post = app.add_subcommand(
      "postprocess", "masks -> instances: opening, seeding, expansion, measurement, exclusion");
  std::string post_mask, post_instances = "instances.png", post_csv = "fragments.csv", post_id;
  ConfigCli post_cfg;
  post->add_option("mask", post_mask, "3-class mask PNG")->required();
  post->add_option("--out-instances", post_instances, "output 16-bit instance PNG");
  post->add_option("--out-csv", post_csv, "output fragment table CSV");
  post->add_option("--image-id", post_id, "image id for the CSV (default: input stem)");
  add_config_flags(post, post_cfg);

  // measure
  auto* meas = app.add_subcommand("measure", "measure fragments from an instance map");
  std::string meas_instances, meas_csv = "fragments.csv", meas_id;
  ConfigCli meas_cfg;
  meas->add_option("instances", meas_instances, "16-bit instance PNG")->required();
  meas->add_option("-o,--out-csv", meas_csv, "output fragment table CSV");
  meas->add_option("--image-id", meas_id, "image id for the CSV (default: input stem)");
  add_config_flags(meas, meas_cfg);

  // psd
  auto* psd_cmd = app.add_subcommand("psd", "size distributions and summaries from fragment CSVs");
  std::vector<std::string> psd_csvs;
  std::string psd_out = "psd";
  ConfigCli psd_cfg;
  psd_cmd->add_option("csv", psd_csvs, "fragment CSV files")->required();
  psd_cmd->add_option("-o,--out-dir", psd_out, "output directory");
  add_config_flags(psd_cmd, psd_cfg);

  // sections
  auto* sect = app.add_subcommand("sections", "per-section statistics and segregation report");
  std::vector<std::string> sect_csvs;
  std::string sect_out = "sections";
  ConfigCli sect_cfg;
  sect->add_option("csv", sect_csvs, "fragment CSV files")->required();
  sect->add_option("-o,--out-dir", sect_out, "output directory");
  add_config_flags(sect, sect_cfg);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score a predicted mask against ground truth");
  std::string eval_pred, eval_truth, eval_out;
  eval_cmd->add_option("pred", eval_pred, "predicted mask PNG")->required();
  eval_cmd->add_option("truth", eval_truth, "ground-truth mask PNG")->required();
  eval_cmd->add_option("-o,--out-json", eval_out, "also write the report as JSON");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic test scene");
  std::string synth_mask = "scene.png", synth_truth = "truth.csv";
  int synth_w = 1024, synth_h = 1024, synth_n = 20, synth_band = 2;
  double synth_amin = 10, synth_amax = 60;
  std::uint64_t synth_seed = 1;
  ConfigCli synth_cfg;
  synth->add_option("-o,--out-mask", synth_mask, "output mask PNG");
  synth->add_option("--out-truth", synth_truth, "output ground-truth CSV");
  synth->add_option("--width", synth_w, "canvas width");
  synth->add_option("--height", synth_h, "canvas height");
  synth->add_option("-n,--count", synth_n, "number of ellipses");
  synth->add_option("--a-min", synth_amin, "minimum semi-major axis, px");
  synth->add_option("--a-max", synth_amax, "maximum semi-major axis, px");
  synth->add_option("--band", synth_band, "boundary band width, px");
  synth->add_option("--seed", synth_seed, "random seed");
  add_config_flags(synth, synth_cfg);

  auto* selftest = app.add_subcommand("kernels-selftest", "run the neural kernel oracle checks");
  (void)selftest;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (tile->parsed()) return cmd_tile(tile_input, tile_out_dir, tile_gray, resolve_config(tile_cfg));
    if (stitch_cmd->parsed()) return cmd_stitch(stitch_dir, stitch_layout, stitch_out);
    if (post->parsed())
      return cmd_postprocess(post_mask, post_instances, post_csv, post_id, resolve_config(post_cfg));
    if (meas->parsed()) return cmd_measure(meas_instances, meas_csv, meas_id, resolve_config(meas_cfg));
    if (psd_cmd->parsed()) return cmd_psd(psd_csvs, psd_out, resolve_config(psd_cfg));
    if (sect->parsed()) return cmd_sections(sect_csvs, sect_out, resolve_config(sect_cfg));
    if (eval_cmd->parsed()) return cmd_eval(eval_pred, eval_truth, eval_out);
    if (synth->parsed())
      return cmd_synth(synth_mask, synth_truth, synth_w, synth_h, synth_n, synth_amin, synth_amax,
                       synth_band, synth_seed, resolve_config(synth_cfg));
    if (selftest->parsed()) return cmd_kernels_selftest();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
