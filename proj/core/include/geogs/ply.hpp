#pragma once

#include "geogs/geometry.hpp"
#include "geogs/types.hpp"

#include <filesystem>
#include <string>

namespace geogs {

/// Binary little-endian PLY in the 3DGS property layout plus a `kind` byte per splat.
std::string encode_ply(const GaussianMap& map);
void write_ply(const GaussianMap& map, const std::filesystem::path& path);

/// Inverse of encode_ply. Files without `kind` load every splat as Free.
GaussianMap decode_ply(const std::string& bytes);
GaussianMap read_ply(const std::filesystem::path& path);

/// Plain point cloud PLY: float x y z and uchar red green blue (sRGB encoded).
void write_point_cloud(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_point_cloud(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace geogs
