#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eegrid/features.hpp"
#include "eegrid/topomap.hpp"

namespace eegrid {

// Extracted sample sets persisted in the EEGRID01 container (kind 2).
// Payloads are little-endian f32; values in memory pass through f32 on both
// write and read so a stored set reloads bit-exactly.
struct FeatureSetMeta {
  int model{1};  // 1 = channel matrix, 2 = topographic grid
  std::string task;
  std::vector<std::string> feature_layout;
  std::vector<std::string> channels;  // montage order (provenance)
  int rows{0};                        // model 1: M, model 2: K
  int cols{0};                        // model 1: B, model 2: K
  int depth{1};                       // model 1: 1, model 2: B
};

void save_feature_matrices(const FeatureSetMeta& meta, const std::vector<FeatureMatrix>& samples,
                           const std::filesystem::path& path);
void save_feature_grids(const FeatureSetMeta& meta, const std::vector<FeatureGrid>& samples,
                        const std::filesystem::path& path);

FeatureSetMeta peek_feature_set(const std::filesystem::path& path);
std::vector<FeatureMatrix> load_feature_matrices(const std::filesystem::path& path,
                                                 FeatureSetMeta* meta_out = nullptr);
std::vector<FeatureGrid> load_feature_grids(const std::filesystem::path& path,
                                            FeatureSetMeta* meta_out = nullptr);

}  // namespace eegrid
