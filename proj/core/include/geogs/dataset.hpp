#pragma once

#include "geogs/geometry.hpp"
#include "geogs/surfaces.hpp"
#include "geogs/synth.hpp"
#include "geogs/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace geogs {

/// Contents of a dataset directory: points.ply, cameras.txt, images/<id>.png and optionally scene.txt.
struct Dataset {
    PointCloud cloud;
    std::vector<CameraView> cameras;
    /// Reference surfaces from scene.txt; empty when the file is absent.
    std::vector<Surface> surfaces;
};

/// Loads and validates a dataset directory. Throws IoError describing the first problem found.
Dataset load_dataset(const std::filesystem::path& dir);

/// cameras.txt: `W H fx fy cx cy`, then one `id tx ty tz qw qx qy qz` line per view (world-to-camera).
std::string format_cameras(const std::vector<CameraView>& cameras);
std::vector<CameraView> parse_cameras(const std::string& text);
std::vector<CameraView> read_cameras(const std::filesystem::path& path);

/// scene.txt: one surface per line,
/// `plane cx cy cz nx ny nz ux uy uz half_u half_v` or `box minx miny minz maxx maxy maxz`.
std::string format_scene(const std::vector<Surface>& surfaces);
std::vector<Surface> parse_scene(const std::string& text);
std::vector<Surface> read_scene(const std::filesystem::path& path);

/// Writes the scene in the dataset layout, plus gt.ply with its ground-truth splats.
void export_dataset(const SyntheticScene& scene, const std::filesystem::path& dir);

}  // namespace geogs
