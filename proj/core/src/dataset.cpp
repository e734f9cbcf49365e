#include "geogs/dataset.hpp"

#include "geogs/error.hpp"
#include "geogs/image_io.hpp"
#include "geogs/ply.hpp"
#include "geogs/transforms.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace geogs {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string format_cameras(const std::vector<CameraView>& cameras) {
    if (cameras.empty()) {
        throw InputError("format_cameras: no cameras");
    }
    const Intrinsics& k = cameras.front().intrinsics;
    std::ostringstream os;
    os << k.width << ' ' << k.height << ' ' << fmt(k.fx) << ' ' << fmt(k.fy) << ' ' << fmt(k.cx) << ' ' << fmt(k.cy)
       << '\n';
    for (const CameraView& cam : cameras) {
        const Intrinsics& c = cam.intrinsics;
        if (c.width != k.width || c.height != k.height || c.fx != k.fx || c.fy != k.fy || c.cx != k.cx ||
            c.cy != k.cy) {
            throw InputError("format_cameras: cameras must share intrinsics");
        }
        const Quat q = quaternion_from_matrix(cam.pose_cw.rotation);
        const Vec3& t = cam.pose_cw.translation;
        os << cam.id << ' ' << fmt(t.x()) << ' ' << fmt(t.y()) << ' ' << fmt(t.z()) << ' ' << fmt(q[0]) << ' '
           << fmt(q[1]) << ' ' << fmt(q[2]) << ' ' << fmt(q[3]) << '\n';
    }
    return os.str();
}

std::vector<CameraView> parse_cameras(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Intrinsics k;
    bool have_intrinsics = false;
    std::vector<CameraView> out;
    std::set<std::string> ids;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') {
            continue;
        }
        std::istringstream ls(line);
        const std::string where = "cameras.txt line " + std::to_string(line_no);
        if (!have_intrinsics) {
            if (!(ls >> k.width >> k.height >> k.fx >> k.fy >> k.cx >> k.cy)) {
                throw IoError(where + ": expected 'W H fx fy cx cy'");
            }
            if (k.width <= 0 || k.height <= 0 || !(k.fx > 0.0) || !(k.fy > 0.0)) {
                throw IoError(where + ": invalid intrinsics");
            }
            have_intrinsics = true;
            continue;
        }
        CameraView cam;
        Vec3 t;
        Quat q;
        if (!(ls >> cam.id >> t.x() >> t.y() >> t.z() >> q[0] >> q[1] >> q[2] >> q[3])) {
            throw IoError(where + ": expected 'id tx ty tz qw qx qy qz'");
        }
        std::string extra;
        if (ls >> extra) {
            throw IoError(where + ": trailing data after quaternion");
        }
        if (!t.allFinite() || !q.allFinite()) {
            throw IoError("view '" + cam.id + "': non-finite pose");
        }
        if (std::abs(q.norm() - 1.0) > 1e-3) {
            throw IoError("view '" + cam.id + "': quaternion is not unit (norm " + fmt(q.norm()) + ")");
        }
        if (!ids.insert(cam.id).second) {
            throw IoError("view '" + cam.id + "' is listed twice");
        }
        cam.intrinsics = k;
        cam.pose_cw.rotation = rotation_matrix(q);
        cam.pose_cw.translation = t;
        out.push_back(std::move(cam));
    }
    if (!have_intrinsics) {
        throw IoError("cameras.txt: missing intrinsics line");
    }
    if (out.empty()) {
        throw IoError("cameras.txt: no views");
    }
    return out;
}

std::vector<CameraView> read_cameras(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing camera file '" + path.string() + "'");
    }
    return parse_cameras(read_file(path));
}

std::string format_scene(const std::vector<Surface>& surfaces) {
    std::ostringstream os;
    for (const Surface& s : surfaces) {
        if (const auto* p = std::get_if<PlanarPatch>(&s)) {
            os << "plane";
            for (const Vec3* v : {&p->center, &p->normal, &p->u_axis}) {
                for (int k = 0; k < 3; ++k) os << ' ' << fmt((*v)[k]);
            }
            os << ' ' << fmt(p->half_u) << ' ' << fmt(p->half_v) << '\n';
        } else {
            const auto& b = std::get<AxisBox>(s);
            os << "box";
            for (int k = 0; k < 3; ++k) os << ' ' << fmt(b.min[k]);
            for (int k = 0; k < 3; ++k) os << ' ' << fmt(b.max[k]);
            os << '\n';
        }
    }
    return os.str();
}

std::vector<Surface> parse_scene(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Surface> out;
    int line_no = 0;
    auto number = [](std::istringstream& ls, double& v) {
        std::string tok;
        if (!(ls >> tok)) return false;
        try {
            std::size_t used = 0;
            v = std::stod(tok, &used);
            return used == tok.size();
        } catch (const std::exception&) {
            return false;
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind) || kind[0] == '#') {
            continue;
        }
        const std::string where = "scene line " + std::to_string(line_no);
        if (kind == "plane") {
            double v[11];
            for (double& x : v) {
                if (!number(ls, x)) throw IoError(where + ": expected 11 numbers after 'plane'");
            }
            PlanarPatch p;
            p.center = Vec3(v[0], v[1], v[2]);
            p.normal = Vec3(v[3], v[4], v[5]);
            p.u_axis = Vec3(v[6], v[7], v[8]);
            p.half_u = v[9];
            p.half_v = v[10];
            if (std::abs(p.normal.norm() - 1.0) > 1e-9 || std::abs(p.u_axis.norm() - 1.0) > 1e-9 ||
                std::abs(p.normal.dot(p.u_axis)) > 1e-9 || !(p.half_u >= 0.0) || !(p.half_v >= 0.0)) {
                throw IoError(where + ": plane axes must be orthonormal and extents non-negative");
            }
            out.emplace_back(p);
        } else if (kind == "box") {
            double v[6];
            for (double& x : v) {
                if (!number(ls, x)) throw IoError(where + ": expected 6 numbers after 'box'");
            }
            AxisBox b{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])};
            if (((b.max - b.min).array() < 0.0).any()) {
                throw IoError(where + ": box min exceeds max");
            }
            out.emplace_back(b);
        } else {
            throw IoError(where + ": unknown surface kind '" + kind + "'");
        }
    }
    return out;
}

std::vector<Surface> read_scene(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing scene file '" + path.string() + "'");
    }
    auto s = parse_scene(read_file(path));
    if (s.empty()) {
        throw IoError("scene file '" + path.string() + "' declares no surfaces");
    }
    return s;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw IoError("dataset directory '" + dir.string() + "' does not exist");
    }
    Dataset ds;
    const fs::path points = dir / "points.ply";
    if (!fs::exists(points)) {
        throw IoError("dataset is missing points.ply");
    }
    try {
        ds.cloud = read_point_cloud(points);
    } catch (const ParseError& e) {
        throw IoError(std::string("points.ply: ") + e.what());
    }
    ds.cameras = read_cameras(dir / "cameras.txt");
    for (CameraView& cam : ds.cameras) {
        const fs::path img = dir / "images" / (cam.id + ".png");
        if (!fs::exists(img)) {
            throw IoError("view '" + cam.id + "': missing image " + img.string());
        }
        cam.reference = read_png(img);
        if (cam.reference.width != cam.intrinsics.width || cam.reference.height != cam.intrinsics.height) {
            throw IoError("view '" + cam.id + "': image is " + std::to_string(cam.reference.width) + "x" +
                          std::to_string(cam.reference.height) + ", cameras.txt declares " +
                          std::to_string(cam.intrinsics.width) + "x" + std::to_string(cam.intrinsics.height));
        }
    }
    if (fs::exists(dir / "scene.txt")) {
        ds.surfaces = read_scene(dir / "scene.txt");
    }
    return ds;
}

void export_dataset(const SyntheticScene& scene, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir / "images", ec);
    if (ec) {
        throw IoError("cannot create '" + (dir / "images").string() + "': " + ec.message());
    }
    write_point_cloud(scene.point_cloud, dir / "points.ply");
    write_file(dir / "cameras.txt", format_cameras(scene.cameras));
    for (const CameraView& cam : scene.cameras) {
        write_png(cam.reference, dir / "images" / (cam.id + ".png"));
    }
    write_file(dir / "scene.txt", format_scene(scene.surfaces));
    write_ply(scene.gt_splats, dir / "gt.ply");
}

}  // namespace geogs
