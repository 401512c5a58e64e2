#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fragscan/fusion.hpp"
#include "fragscan/graindist.hpp"
#include "fragscan/neuralkernels.hpp"
#include "fragscan/raster.hpp"
#include "fragscan/segeval.hpp"
#include "fragscan/shape.hpp"

namespace fragscan {

struct PipelineConfig {
  double cm_per_pixel = 1.0;
  int window = 512;
  int stride = 256;
  int se_half = 4;               // 9x9 opening
  int max_radius = 10;           // expansion limit, px
  double min_diameter_px = 10.0; // fine-particle exclusion, inclusive
  double count_bin_cm = 0.2;
  double volume_bin_cm = 0.8;
  double below_cm = 5.0;         // count-summary thresholds
  double above_cm = 20.0;
  std::string section_map;
  bool include_border_fragments = true;
  CarafeConfig carafe;
  bool ghost_rectify = true;

  void validate() const;  // throws std::invalid_argument on any out-of-range field
};

/// key = value lines; '#' starts a comment. Unknown keys are rejected.
PipelineConfig load_config(const std::string& path);
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

struct PostprocessResult {
  InstanceMap instances;
  std::vector<Fragment> fragments;
};

/// Opening -> seeds -> expansion -> measurement -> fine-particle exclusion.
PostprocessResult run_postprocess(const ClassMask& mask, const PipelineConfig& cfg);

struct SectionMapEntry {
  std::string image_id;
  std::string section_id;
  double depth_lo_m = 0.0;
  double depth_hi_m = 0.0;
};

/// Text table: image_id section_id depth_lo depth_hi (whitespace separated).
std::vector<SectionMapEntry> load_section_map(const std::string& path);

struct ImageFragments {
  std::string image_id;
  std::vector<Fragment> fragments;
};

struct SectionsResult {
  std::vector<SectionReport> sections;  // ordered by depth, then id
  SizeDistribution overall_dist;
  CharacteristicDiameters overall;
  SegregationReport segregation;
};

/// Groups per-image characteristic diameters into section reports and builds
/// the segregation summary against the pooled distribution.
SectionsResult run_sections(const std::vector<ImageFragments>& images,
                            const std::vector<SectionMapEntry>& section_map,
                            const PipelineConfig& cfg);

/// Drops border-touching fragments when the config says to exclude them.
std::vector<Fragment> apply_border_policy(const std::vector<Fragment>& fragments,
                                          const PipelineConfig& cfg);

}  // namespace fragscan
