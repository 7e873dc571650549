#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <vector>

#include "minsurf/quad.hpp"

namespace minsurf {

using Vec3 = Eigen::Vector3d;
using FormTriple = std::array<cplx, 3>;

// The curve w^2 = z (z - 1) (z + sigma).
struct CurveParams {
    double sigma = 1.0;

    explicit CurveParams(double s);
    std::array<cplx, 3> roots() const { return {cplx(0.0), cplx(1.0), cplx(-sigma)}; }
    cplx poly(cplx z) const { return z * (z - 1.0) * (z + sigma); }
    double default_clearance() const { return 1e-3 * (1.0 + sigma); }
};

struct CurvePoint {
    cplx z;
    cplx w;
};

// Densities with respect to dz.
struct WeierstrassForms {
    cplx g;
    cplx phi1;
    cplx phi2;
    cplx phi3;
};

enum class LoopKind { Gamma1, Gamma2, EndLoop };

struct HomologyLoop {
    LoopKind kind;
    CurvePoint base;
    ComplexPath geometry;  // closed: first node == last node == base.z
};

enum class Symmetry { S1, S2, S3 };

bool on_curve(const CurveParams& c, const CurvePoint& p, double tol = 1e-9);

// Principal-sign representative of sqrt(P(z)).
CurvePoint point_at(const CurveParams& c, cplx z);

WeierstrassForms weierstrass_forms(const CurveParams& c, const CurvePoint& p);

// Analytic continuation of w along a polyline avoiding the branch points.
cplx continue_w(const CurveParams& c, const ComplexPath& path, cplx w_start);

struct PathIntegral {
    FormTriple periods{};  // (int phi1, int phi2, int phi3)
    CurvePoint end{};
};

// Integrates (phi1, phi2, phi3) with w carried continuously along the path.
// When end_at_branch is set the last node may be a branch point; the
// endpoint singularity is then handled by a change of variables.
PathIntegral integrate_forms(const CurveParams& c, const ComplexPath& path, cplx w_start,
                             const QuadSettings& s = {}, bool end_at_branch = false);

struct Immersed {
    Vec3 position;
    CurvePoint end;
};

Immersed immerse(const CurveParams& c, const ComplexPath& path, cplx w_start, const Vec3& base_position,
                 const QuadSettings& s = {});

Vec3 gauss_map(const WeierstrassForms& f);
double gaussian_curvature(const WeierstrassForms& f, cplx g_prime);

HomologyLoop make_loop(const CurveParams& c, LoopKind kind);
HomologyLoop reversed(const HomologyLoop& loop);
HomologyLoop repeated(const HomologyLoop& loop, int times);

FormTriple period(const CurveParams& c, const HomologyLoop& loop, const QuadSettings& s = {});
Vec3 flux(const CurveParams& c, const HomologyLoop& loop, const QuadSettings& s = {});

CurvePoint apply_symmetry(const CurveParams& c, Symmetry which, const CurvePoint& p);
double verify_symmetry_action(const CurveParams& c, Symmetry which, std::span<const CurvePoint> samples);

double gauss_ode_residual(const CurveParams& c, const CurvePoint& p);

// (g, g', ..., g^(order)) in the coordinate xi with d xi = dz/w, from the
// relations (g')^2 = Q(g) and g'' = R(g).
std::vector<cplx> gauss_jet(const CurveParams& c, const CurvePoint& p, int order);

// Seeded regular points on the curve, drawn from an annulus about the
// origin with the branch points' clearance discs removed.
std::vector<CurvePoint> random_points(const CurveParams& c, std::size_t n, unsigned seed);

// X(z) - X(1) on the closed upper half-plane, computed from the basepoint
// (1 + delta, positive real w).
class Immersion {
public:
    explicit Immersion(double sigma, double delta = 1e-2, QuadSettings s = {});

    const CurveParams& curve() const { return curve_; }
    const CurvePoint& basepoint() const { return base_; }
    const Vec3& base_position() const { return base_pos_; }

    // Position at z (Im z >= 0); branch points are allowed.
    Immersed at(cplx z) const;
    // Continue from a known sample to z along the straight segment.
    Immersed step(const Immersed& from, cplx z) const;

private:
    CurveParams curve_;
    QuadSettings settings_;
    CurvePoint base_;
    Vec3 base_pos_;
};

}  // namespace minsurf
