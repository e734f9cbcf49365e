#include "support.hpp"

#include "geogs/error.hpp"
#include "geogs/sh.hpp"
#include "geogs/transforms.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <cmath>

using namespace geogs;
using namespace geogs::testing;

namespace {

// Real SH polynomials in the usual graphics ordering, written out term by term.
std::vector<double> sh_polynomials(const Vec3& d) {
    const double x = d.x(), y = d.y(), z = d.z();
    const double xx = x * x, yy = y * y, zz = z * z;
    return {
        0.28209479177387814,
        -0.4886025119029199 * y,
        0.4886025119029199 * z,
        -0.4886025119029199 * x,
        1.0925484305920792 * x * y,
        -1.0925484305920792 * y * z,
        0.31539156525252005 * (2.0 * zz - xx - yy),
        -1.0925484305920792 * x * z,
        0.5462742152960396 * (xx - yy),
        -0.5900435899266435 * y * (3.0 * xx - yy),
        2.890611442640554 * x * y * z,
        -0.4570457994644658 * y * (4.0 * zz - xx - yy),
        0.3731763325901154 * z * (2.0 * zz - 3.0 * xx - 3.0 * yy),
        -0.4570457994644658 * x * (4.0 * zz - xx - yy),
        1.445305721320277 * z * (xx - yy),
        -0.5900435899266435 * x * (xx - 3.0 * yy),
    };
}

Vec3 oracle_color(const ShCoeffs& sh, const Vec3& d) {
    const auto y = sh_polynomials(d);
    Vec3 c = Vec3::Constant(0.5);
    for (int r = 0; r < sh.rows(); ++r) {
        c += sh.row(r).transpose() * y[static_cast<std::size_t>(r)];
    }
    return c.cwiseMax(0.0);
}

}  // namespace

TEST_CASE("build_covariance: identity and diagonal cases") {
    CHECK(build_covariance(Vec3::Zero(), Quat(1, 0, 0, 0)).isApprox(Mat3::Identity(), 1e-15));
    const Mat3 s = build_covariance(Vec3(std::log(2.0), 0.0, std::log(0.001)), Quat(1, 0, 0, 0));
    CHECK(s(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s(2, 2) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK(std::abs(s(0, 1)) + std::abs(s(0, 2)) + std::abs(s(1, 2)) == 0.0);
}

TEST_CASE("build_covariance: eigenvalues of a rotated covariance are the squared scales") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat3 s = build_covariance(Vec3(std::log(3.0), std::log(2.0), 0.0), random_quat(rng));
        Eigen::SelfAdjointEigenSolver<Mat3> eig(s);
        CHECK(eig.eigenvalues()[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(eig.eigenvalues()[1] == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(eig.eigenvalues()[2] == doctest::Approx(9.0).epsilon(1e-12));
    }
}

TEST_CASE("build_covariance: quaternion sign flip gives the identical matrix") {
    Rng rng(12);
    for (int trial = 0; trial < 1000; ++trial) {
        const Quat q = random_quat(rng);
        const Vec3 ls(uniform(rng, -3, 1), uniform(rng, -3, 1), uniform(rng, -3, 1));
        CHECK(build_covariance(ls, q) == build_covariance(ls, -q));
    }
}

TEST_CASE("Thin splat: smallest eigenpair is the frozen thickness along the normal") {
    Rng rng(13);
    for (int trial = 0; trial < 500; ++trial) {
        GaussianSplat s = random_splat(rng, SplatKind::Thin, 0);
        const Mat3 cov = splat_covariance(s);
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        CHECK(std::abs(eig.eigenvalues()[0] - 1e-6) < 1e-12);
        const double c = std::abs(eig.eigenvectors().col(0).dot(normal_of(s)));
        CHECK(std::acos(std::min(1.0, c)) < 1e-6);
        CHECK(activated_scales(s).z() == 0.001);
    }
}

TEST_CASE("activated_scales ignores the stored thickness of Thin splats") {
    GaussianSplat s;
    s.kind = SplatKind::Thin;
    s.log_scales = Vec3(0.0, 0.0, 5.0);
    CHECK(activated_scales(s).z() == kThinThickness);
    s.kind = SplatKind::Free;
    CHECK(activated_scales(s).z() == doctest::Approx(std::exp(5.0)));
}

TEST_CASE("sigmoid and logit") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(800.0) <= 1.0);
    for (double p : {1e-6, 0.05, 0.3, 0.5, 0.9, 1 - 1e-6}) {
        CHECK(sigmoid(logit(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK_THROWS_AS(logit(0.0), InputError);
    CHECK_THROWS_AS(logit(1.0), InputError);
}

TEST_CASE("eval_sh_color: constant band and offset") {
    ShCoeffs sh = ShCoeffs::Zero(1, 3);
    sh(0, 0) = 0.5 / 0.28209479;
    const Vec3 c = eval_sh_color(sh, Vec3::UnitZ());
    CHECK(c.x() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(c.y() == 0.5);
    CHECK(c.z() == 0.5);
    const ShCoeffs zeros = ShCoeffs::Zero(9, 3);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        CHECK(eval_sh_color(zeros, random_unit(rng)) == Vec3::Constant(0.5));
    }
}

TEST_CASE("eval_sh_color: degree 0 does not depend on direction") {
    Rng rng(4);
    ShCoeffs sh = ShCoeffs::Zero(1, 3);
    sh.row(0) << 0.3, -0.7, 1.1;
    const Vec3 ref = eval_sh_color(sh, Vec3::UnitX());
    for (int i = 0; i < 100; ++i) {
        CHECK(eval_sh_color(sh, random_unit(rng)) == ref);
    }
}

TEST_CASE("eval_sh_color matches direct polynomial evaluation up to degree 3") {
    Rng rng(5);
    for (int degree = 0; degree <= 3; ++degree) {
        for (int trial = 0; trial < 50; ++trial) {
            ShCoeffs sh = ShCoeffs::Zero(sh_coeff_count(degree), 3);
            for (Eigen::Index k = 0; k < sh.size(); ++k) sh.data()[k] = uniform(rng, -0.6, 0.6);
            const Vec3 d = random_unit(rng);
            CHECK((eval_sh_color(sh, d) - oracle_color(sh, d)).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("eval_sh_color: antipodal directions differ when odd bands are present") {
    Rng rng(6);
    ShCoeffs sh = ShCoeffs::Zero(9, 3);
    for (Eigen::Index k = 0; k < sh.size(); ++k) sh.data()[k] = uniform(rng, -0.3, 0.3);
    const Vec3 d = random_unit(rng);
    CHECK((eval_sh_color(sh, d) - eval_sh_color(sh, -d)).norm() > 1e-6);
    sh.block(1, 0, 3, 3).setZero();
    CHECK((eval_sh_color(sh, d) - eval_sh_color(sh, -d)).norm() < 1e-14);
}

TEST_CASE("sh_basis is orthonormal over the sphere") {
    // Gauss-Legendre in cos(theta) times a uniform rule in phi integrates degree <= 6 exactly.
    const int n = 8;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = i / std::sqrt(4.0 * i * i - 1.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    const int m = 16;
    Eigen::Matrix<double, 16, 16> gram = Eigen::Matrix<double, 16, 16>::Zero();
    std::array<double, kMaxShCoeffs> y{};
    for (int i = 0; i < n; ++i) {
        const double ct = eig.eigenvalues()[i];
        const double wt = 2.0 * eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
        const double st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * M_PI * j / m;
            sh_basis(3, Vec3(st * std::cos(phi), st * std::sin(phi), ct), y);
            for (int a = 0; a < 16; ++a)
                for (int b = 0; b < 16; ++b) gram(a, b) += wt * (2.0 * M_PI / m) * y[a] * y[b];
        }
    }
    CHECK((gram - Eigen::Matrix<double, 16, 16>::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eval_sh_color_backward matches finite differences") {
    Rng rng(7);
    for (int trial = 0; trial < 30; ++trial) {
        ShCoeffs sh = ShCoeffs::Zero(9, 3);
        for (Eigen::Index k = 0; k < sh.size(); ++k) sh.data()[k] = uniform(rng, -0.3, 0.3);
        const Vec3 d = random_unit(rng);
        const Vec3 up(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        const ShColorGrad g = eval_sh_color_backward(sh, d, up);
        const double h = 1e-6;
        for (Eigen::Index k = 0; k < sh.size(); ++k) {
            ShCoeffs p = sh, m = sh;
            p.data()[k] += h;
            m.data()[k] -= h;
            const double fd = (up.dot(eval_sh_color(p, d)) - up.dot(eval_sh_color(m, d))) / (2 * h);
            CHECK(g.d_coeffs.data()[k] == doctest::Approx(fd).epsilon(1e-6));
        }
        for (int k = 0; k < 3; ++k) {
            Vec3 p = d, m = d;
            p[k] += h;
            m[k] -= h;
            const double fd = (up.dot(eval_sh_color(sh, p)) - up.dot(eval_sh_color(sh, m))) / (2 * h);
            CHECK(g.d_dir[k] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("normal_of: canonical rotations") {
    GaussianSplat s;
    s.kind = SplatKind::Thin;
    CHECK(normal_of(s) == Vec3(0, 0, 1));
    s.rotation = Quat(std::cos(M_PI / 4), std::sin(M_PI / 4), 0, 0);
    CHECK((normal_of(s) - Vec3(0, -1, 0)).norm() < 1e-15);
    s.kind = SplatKind::Free;
    CHECK_THROWS_AS(normal_of(s), ContractError);
}

TEST_CASE("normal_of matches an independent quaternion-to-matrix conversion") {
    Rng rng(8);
    for (int trial = 0; trial < 1000; ++trial) {
        GaussianSplat s;
        s.kind = SplatKind::Thin;
        s.rotation = random_quat(rng) * uniform(rng, 0.5, 2.0);
        const Eigen::Quaterniond q(s.rotation[0], s.rotation[1], s.rotation[2], s.rotation[3]);
        const Vec3 expected = q.normalized().toRotationMatrix().col(2);
        CHECK((normal_of(s) - expected).norm() < 1e-14);
        CHECK((rotation_matrix(s.rotation) - q.normalized().toRotationMatrix()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("quaternion_from_matrix round trip reproduces the rotation") {
    Rng rng(9);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat3 r = random_rotation(rng);
        const Quat q = quaternion_from_matrix(r);
        CHECK(q[0] >= 0.0);
        CHECK((rotation_matrix(q) - r).cwiseAbs().maxCoeff() < 1e-9);
    }
    // Branches for 180 degree rotations.
    for (const Mat3& r : {Mat3(Vec3(1, -1, -1).asDiagonal()), Mat3(Vec3(-1, 1, -1).asDiagonal()),
                          Mat3(Vec3(-1, -1, 1).asDiagonal())}) {
        CHECK((rotation_matrix(quaternion_from_matrix(r)) - r).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("rotation_matrix_backward matches finite differences") {
    Rng rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        const Quat q = random_quat(rng) * uniform(rng, 0.5, 2.0);
        Mat3 up;
        for (int k = 0; k < 9; ++k) up.data()[k] = uniform(rng, -1, 1);
        const Quat g = rotation_matrix_backward(q, up);
        const Vec3 un = Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1));
        const Quat gn = rotation_normal_backward(q, un);
        for (int k = 0; k < 4; ++k) {
            Quat p = q, m = q;
            p[k] += 1e-6;
            m[k] -= 1e-6;
            const double fd = ((up.cwiseProduct(rotation_matrix(p))).sum() - (up.cwiseProduct(rotation_matrix(m))).sum()) / 2e-6;
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
            const double fdn = (un.dot(rotation_normal(p)) - un.dot(rotation_normal(m))) / 2e-6;
            CHECK(gn[k] == doctest::Approx(fdn).epsilon(1e-6));
        }
    }
}

TEST_CASE("normalized rejects a zero quaternion") {
    CHECK_THROWS_AS(normalized(Quat::Zero()), InputError);
}

TEST_CASE("CameraView::validate") {
    CameraView cam = make_camera(32, 24);
    CHECK_NOTHROW(cam.validate());
    cam.intrinsics.fx = 0.0;
    CHECK_THROWS_AS(cam.validate(), InputError);
    cam = make_camera(32, 24);
    cam.intrinsics.cx = 32.0;
    CHECK_THROWS_AS(cam.validate(), InputError);
    cam = make_camera(32, 24);
    cam.pose_cw.rotation(0, 0) = -1.0;  // reflection
    CHECK_THROWS_AS(cam.validate(), InputError);
    cam = make_camera(32, 24);
    cam.reference = Image(10, 10);
    CHECK_THROWS_AS(cam.validate(), InputError);
}

TEST_CASE("sh_degree_of") {
    CHECK(sh_degree_of(ShCoeffs::Zero(1, 3)) == 0);
    CHECK(sh_degree_of(ShCoeffs::Zero(9, 3)) == 2);
    CHECK_THROWS_AS(sh_degree_of(ShCoeffs::Zero(5, 3)), ConfigError);
}
