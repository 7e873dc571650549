#pragma once

#include <array>
#include <functional>

#include "minsurf/curve.hpp"
#include "minsurf/quad.hpp"

namespace minsurf {

// Riemann's family with the centre-velocity vector a fixed to (1, 0).
struct RiemannParams {
    double lambda = 0.0;
    double q1 = 1.0;
    double zeta = 0.0;

    static RiemannParams make(double lambda, const QuadSettings& s = {});
};

double q_min(double lambda);
double sigma_of_lambda(double lambda);
// Inverse of sigma_of_lambda: q1 = sigma^(-1/2), lambda = 1/q1 - q1.
double lambda_of_sigma(double sigma);

// Height z(q) and centre abscissa f(q) of the circle of radius sqrt(q).
double height(const RiemannParams& p, double q, const QuadSettings& s = {});
double center_offset(const RiemannParams& p, double q, const QuadSettings& s = {});
double slab_height(double lambda, const QuadSettings& s = {});

// Inverse of height on [0, zeta).
double q_at_height(const RiemannParams& p, double z, const QuadSettings& s = {});

Vec3 parameterize(const RiemannParams& p, double q, double v, const QuadSettings& s = {});

// Increments of (f, z) between q0 and q1, both away from the neck.
std::array<double, 2> profile_increment(const RiemannParams& p, double q0, double q1, const QuadSettings& s = {});

// Half catenoid (a = 0): closed form and the quadrature it must reproduce.
double catenoid_height(double lambda, double q);
double catenoid_height_quadrature(double lambda, double q, const QuadSettings& s = {});

struct GaussLimit {
    double numeric;
    double closed_form;     // 2/(lambda - sqrt(lambda^2 + 4))
    double minus_sqrt_sigma;
    std::array<double, 3> sequence;  // samples at q = 1e3, 1e4, 1e5
};

// N1/(1 - N3) at v = 0 as q -> infinity.
GaussLimit gauss_limit(const RiemannParams& p);

struct FoliationData {
    double r = 1, rp = 0, rpp = 0;
    double kappa = 1, kappap = 0;
    double tau = 0;
    double alpha = 0, beta = 0, delta = 0;
    double alphap = 0, betap = 0, deltap = 0;
};

// (a1, ..., a7): coefficients of cos3v, sin3v, cos2v, sin2v, cosv, sinv, 1.
std::array<double, 7> enneper_coefficients(const FoliationData& d);

struct EnneperCheck {
    double residual;
    std::array<double, 7> extracted;
};

// Samples (eG - 2fF + Eg)|Xu ^ Xv| from finite differences of the circle
// family X(u,v) = c(u) + r(u)(cos v n(u) + sin v b(u)) and compares its
// Fourier coefficients with the closed forms.
EnneperCheck enneper_fourier_check(const FoliationData& d, int samples = 256, double h = 1e-5);

struct SurfaceDiagnostics {
    double mean_curvature;
    double conformality;  // max(|E - G|, |F|) / E
};

// Central-difference first and second fundamental forms of a local chart
// X(du, dv) around (0, 0).
SurfaceDiagnostics surface_diagnostics(const std::function<Vec3(double, double)>& chart, double h);

}  // namespace minsurf
