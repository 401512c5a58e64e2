#include "fragscan/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fragscan/png_io.hpp"

namespace fragscan {

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (!(cm_per_pixel > 0) || !std::isfinite(cm_per_pixel)) fail("cm_per_pixel must be positive");
  if (window < 1) fail("window must be >= 1");
  if (stride < 1 || stride > window) fail("stride must be in [1, window]");
  if (se_half < 0) fail("se_half must be >= 0");
  if (max_radius < 0) fail("max_radius must be >= 0");
  if (min_diameter_px < 0) fail("min_diameter_px must be >= 0");
  if (!(count_bin_cm > 0)) fail("count_bin_cm must be positive");
  if (!(volume_bin_cm > 0)) fail("volume_bin_cm must be positive");
  if (!(below_cm >= 0) || !(above_cm >= below_cm)) fail("thresholds need 0 <= below_cm <= above_cm");
  carafe.validate();
}

namespace {

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  try {
    if (key == "cm_per_pixel") cfg.cm_per_pixel = std::stod(value);
    else if (key == "window") cfg.window = std::stoi(value);
    else if (key == "stride") cfg.stride = std::stoi(value);
    else if (key == "se_half") cfg.se_half = std::stoi(value);
    else if (key == "max_radius") cfg.max_radius = std::stoi(value);
    else if (key == "min_diameter_px") cfg.min_diameter_px = std::stod(value);
    else if (key == "count_bin_cm") cfg.count_bin_cm = std::stod(value);
    else if (key == "volume_bin_cm") cfg.volume_bin_cm = std::stod(value);
    else if (key == "below_cm") cfg.below_cm = std::stod(value);
    else if (key == "above_cm") cfg.above_cm = std::stod(value);
    else if (key == "section_map") cfg.section_map = value;
    else if (key == "include_border_fragments") cfg.include_border_fragments = parse_bool(value);
    else if (key == "carafe_sigma") cfg.carafe.sigma = std::stoi(value);
    else if (key == "carafe_k_up") cfg.carafe.k_up = std::stoi(value);
    else if (key == "carafe_k_encoder") cfg.carafe.k_encoder = std::stoi(value);
    else if (key == "carafe_c_m") cfg.carafe.c_m = std::stoi(value);
    else if (key == "carafe_normalizer") {
      if (value == "sigmoid") cfg.carafe.normalizer = KernelNormalizer::sigmoid;
      else if (value == "softmax") cfg.carafe.normalizer = KernelNormalizer::softmax;
      else throw std::invalid_argument("config: carafe_normalizer must be sigmoid or softmax");
    } else if (key == "ghost_rectify") cfg.ghost_rectify = parse_bool(value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
  }
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  PipelineConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config " + path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

PostprocessResult run_postprocess(const ClassMask& mask, const PipelineConfig& cfg) {
  cfg.validate();
  if (!valid_mask(mask)) throw IoError("postprocess: invalid class label in mask");

  const ClassMask opened = morphological_open(mask, cfg.se_half);
  const SeedSet seeds = extract_seeds(opened, 4);
  ExpansionConfig ecfg;
  ecfg.max_radius = cfg.max_radius;
  InstanceMap instances = expand_regions(opened, seeds, ecfg);
  Calibration cal{cfg.cm_per_pixel};
  std::vector<Fragment> fragments = measure(instances, cal);
  auto [filtered, kept] = filter_fine(instances, fragments, cfg.min_diameter_px);
  return {std::move(filtered), std::move(kept)};
}

std::vector<SectionMapEntry> load_section_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open section map " + path);
  std::vector<SectionMapEntry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    SectionMapEntry e;
    if (!(row >> e.image_id)) continue;  // blank line
    if (!(row >> e.section_id >> e.depth_lo_m >> e.depth_hi_m))
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected image_id section_id depth_lo depth_hi");
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<Fragment> apply_border_policy(const std::vector<Fragment>& fragments,
                                          const PipelineConfig& cfg) {
  if (cfg.include_border_fragments) return fragments;
  std::vector<Fragment> kept;
  for (const auto& f : fragments)
    if (!f.touches_border) kept.push_back(f);
  return kept;
}

SectionsResult run_sections(const std::vector<ImageFragments>& images,
                            const std::vector<SectionMapEntry>& section_map,
                            const PipelineConfig& cfg) {
  cfg.validate();

  std::map<std::string, const SectionMapEntry*> by_image;
  for (const auto& e : section_map) by_image[e.image_id] = &e;

  struct SectionAccum {
    const SectionMapEntry* meta = nullptr;
    std::vector<CharacteristicDiameters> per_image;
  };
  std::map<std::string, SectionAccum> sections;
  std::vector<Fragment> pooled;

  for (const auto& img : images) {
    const auto it = by_image.find(img.image_id);
    if (it == by_image.end())
      throw IoError("sections: image '" + img.image_id + "' is missing from the section map");
    const auto fragments = apply_border_policy(img.fragments, cfg);
    if (fragments.empty()) throw IoError("sections: image '" + img.image_id + "' has no fragments");
    const auto dist = psd(fragments, PsdMode::volume, cfg.volume_bin_cm);
    auto& acc = sections[it->second->section_id];
    acc.meta = it->second;
    acc.per_image.push_back(characteristic_diameters(dist));
    pooled.insert(pooled.end(), fragments.begin(), fragments.end());
  }
  if (sections.size() < 2) throw IoError("sections: need at least 2 sections");

  SectionsResult result;
  for (const auto& [id, acc] : sections) {
    if (acc.per_image.size() < 2)
      throw IoError("sections: section '" + id + "' has fewer than 2 images");
    result.sections.push_back(
        section_report(acc.per_image, id, {acc.meta->depth_lo_m, acc.meta->depth_hi_m}));
  }
  std::sort(result.sections.begin(), result.sections.end(),
            [](const SectionReport& a, const SectionReport& b) {
              if (a.depth_range_m.first != b.depth_range_m.first)
                return a.depth_range_m.first < b.depth_range_m.first;
              return a.section_id < b.section_id;
            });

  auto [dist, overall] = pool_overall(pooled, cfg.volume_bin_cm);
  result.overall_dist = std::move(dist);
  result.overall = overall;
  result.segregation = build_segregation(result.sections, overall);
  return result;
}

}  // namespace fragscan
