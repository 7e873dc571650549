#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "minsurf/curve.hpp"

namespace minsurf {

// Half-annulus {e <= |zeta| <= 1, Im zeta >= 0} onto the upper half of the
// disc through 1 and -sigma, with zeta = 1 -> 1 and zeta = -1 -> -sigma.
struct DomainMap {
    double sigma;
    double e;

    cplx operator()(cplx zeta) const;
};

struct IsometryOp {
    Eigen::Matrix3d linear = Eigen::Matrix3d::Identity();
    Vec3 offset = Vec3::Zero();

    Vec3 apply(const Vec3& x) const { return linear * x + offset; }
    Vec3 apply_normal(const Vec3& n) const { return linear * n; }
    bool reverses_orientation() const { return linear.determinant() < 0.0; }
    IsometryOp then(const IsometryOp& next) const;  // next o this
};

struct Provenance {
    double sigma;
    int patch;
};

struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<Vec3> normals;
    std::vector<std::array<int, 3>> faces;
    std::vector<Provenance> provenance;
    // Curve point behind every vertex and the isometry of every patch, so
    // slices can be refined on the analytic surface.
    std::vector<CurvePoint> params;
    std::vector<IsometryOp> patch_ops;
    double sigma = 0.0;
};

struct SampleOptions {
    double warp = 1.0;  // zeta = r exp(i pi t^warp)
    QuadSettings quad{};
};

// Grid vertex (i, j) has index i * nt + j; row 0 is the inner arc |zeta| = e.
TriMesh sample_fundamental(double sigma, double e, int nr, int nt, const SampleOptions& opt = {});

struct ExtensionData {
    std::array<IsometryOp, 4> ops;
    Vec3 c;   // psi(i sqrt(sigma))
    Vec3 t0;  // psi(-sigma)
};

ExtensionData extension_ops(double sigma, const QuadSettings& s = {});

TriMesh extend(const TriMesh& mesh, const std::array<IsometryOp, 4>& ops, int copies);

// Points of the horizontal section at `height`: vertices lying on it and
// edge crossings refined on the analytic surface.
std::vector<Vec3> slice(const TriMesh& mesh, double height, double vertex_tol = 1e-9);

struct CircleFit {
    enum class Kind { Circle, Line } kind = Kind::Circle;
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    double residual = 0.0;
};

CircleFit level_circle_fit(std::span<const Vec3> points, double height_tol = 1e-9);

TriMesh weld(const TriMesh& mesh, double tol = 1e-8);

std::size_t export_obj(const TriMesh& mesh, const std::filesystem::path& path);
std::size_t export_ply(const TriMesh& mesh, const std::filesystem::path& path);

// Points of the fundamental piece at height H found along radial rays of
// the half-annulus, together with their mirror images in {x2 = 0}.
std::vector<Vec3> weierstrass_level_points(const Immersion& imm, double e, double height, int rays = 24);

struct Registration {
    double lambda = 0.0;
    double sigma = 0.0;
    double scale = 0.0;              // classical = scale * Weierstrass
    double max_relative_error = 0.0; // over sampled radii and the neck-to-end spacing
    std::vector<double> classical_radii;
    std::vector<double> weierstrass_radii;
};

// Matches level-circle radii and vertical spacing of the classical example
// with parameter lambda against M_sigma(lambda).
Registration register_constructions(double lambda, int samples = 8);

}  // namespace minsurf
