#include "cq/patch_io.hpp"

#include <json.hpp>

#include "cq/io.hpp"

namespace cq {

std::string patch_csv_string(const GraphPatch& patch) {
  const GridLayout& grid = patch.grid;
  std::string out;
  for (int a = 1; a <= grid.dim(); ++a) out += "x" + std::to_string(a) + ",";
  out += "u\n";

  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (long long node = 0; node < grid.num_nodes(); ++node) {
    grid.coords(node, x);
    for (double v : x) out += format_double(v) + ",";
    out += format_double(patch.u[static_cast<std::size_t>(node)]);
    out += '\n';
  }
  return out;
}

void write_patch_csv(const GraphPatch& patch, const std::string& path) {
  write_text_file(path, patch_csv_string(patch));
}

void write_patch_json(const PatchMeta& meta, const std::string& path) {
  nlohmann::json j;
  j["n"] = meta.n;
  j["r"] = meta.r;
  j["m"] = meta.m;
  j["kind"] = meta.kind;
  j["params"] = meta.params;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace cq
