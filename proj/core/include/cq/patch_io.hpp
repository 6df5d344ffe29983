#pragma once

#include <string>
#include <vector>

#include "cq/geometry.hpp"

namespace cq {

/// Metadata carried by the JSON sidecar of a serialized patch.
struct PatchMeta {
  int n = 0;
  double r = 0.0;
  int m = 0;
  std::string kind;
  std::vector<double> params;
};

/// CSV with columns x1..xn,u, one row per node in lexicographic order.
std::string patch_csv_string(const GraphPatch& patch);
void write_patch_csv(const GraphPatch& patch, const std::string& path);

void write_patch_json(const PatchMeta& meta, const std::string& path);

}  // namespace cq
