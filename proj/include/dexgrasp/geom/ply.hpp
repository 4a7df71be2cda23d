#pragma once

#include "dexgrasp/geom/scene.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace dexgrasp::geom {

/// Extra per-vertex scalar columns written after x/y/z.
struct PlyColumn {
  std::string name;
  bool is_uchar = false;
  std::vector<double> values;
};

/// Binary little-endian PLY with float x/y/z and the given extra columns.
void write_ply(const std::filesystem::path& path, const std::vector<Vec3>& points,
               const std::vector<PlyColumn>& columns);

/// Segmented cloud as PLY with fields x/y/z (float) and flag (uchar).
void write_cloud_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_cloud_ply(const std::filesystem::path& path);

}  // namespace dexgrasp::geom
