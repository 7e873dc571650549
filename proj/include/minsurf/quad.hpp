#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "minsurf/errors.hpp"

namespace minsurf {

using cplx = std::complex<double>;

struct QuadSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
};

struct ComplexPath {
    std::vector<cplx> nodes;
    double clearance = 0.0;
};

namespace detail {

// 15-point Kronrod nodes on [-1,1] (non-negative half); odd indices are the
// embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double err_norm(double v) { return std::abs(v); }
inline double err_norm(const cplx& v) { return std::abs(v); }
template <std::size_t N>
double err_norm(const std::array<cplx, N>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}
inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
template <std::size_t N>
bool all_finite(const std::array<cplx, N>& v) {
    return std::all_of(v.begin(), v.end(), [](const cplx& x) { return all_finite(x); });
}

template <class T> T zero_of() { return T{}; }
template <class T> T scaled(const T& v, double s) { return v * s; }
template <std::size_t N>
std::array<cplx, N> scaled(const std::array<cplx, N>& v, double s) {
    std::array<cplx, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = v[i] * s;
    return r;
}
template <class T> void accumulate(T& acc, const T& v) { acc += v; }
template <std::size_t N>
void accumulate(std::array<cplx, N>& acc, const std::array<cplx, N>& v) {
    for (std::size_t i = 0; i < N; ++i) acc[i] += v[i];
}
template <class T> T difference(const T& a, const T& b) { return a - b; }
template <std::size_t N>
std::array<cplx, N> difference(const std::array<cplx, N>& a, const std::array<cplx, N>& b) {
    std::array<cplx, N> r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
    return r;
}

template <class T>
struct Interval {
    double a, b;
    T value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

template <class T, class F>
Interval<T> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    T fc = f(c);
    if (!all_finite(fc)) throw NonFinite("integrand is not finite at t=" + std::to_string(c));
    T k = scaled(fc, kWgk[7]);
    T g = scaled(fc, kWg[3]);
    for (int i = 0; i < 7; ++i) {
        T f1 = f(c - h * kXgk[i]);
        T f2 = f(c + h * kXgk[i]);
        if (!all_finite(f1) || !all_finite(f2))
            throw NonFinite("integrand is not finite near t=" + std::to_string(c));
        T s = f1;
        accumulate(s, f2);
        accumulate(k, scaled(s, kWgk[i]));
        if (i % 2 == 1) accumulate(g, scaled(s, kWg[i / 2]));
    }
    k = scaled(k, h);
    g = scaled(g, h);
    return {a, b, k, err_norm(difference(k, g))};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) over [a,b]. T is double, complex or
// a fixed array of complex values (error measured in the max norm).
template <class T, class F>
T integrate_gk(F&& f, double a, double b, const QuadSettings& s = {}) {
    using detail::Interval;
    if (a == b) return detail::zero_of<T>();
    std::priority_queue<Interval<T>> heap;
    auto first = detail::gk15<T>(f, a, b);
    T total = first.value;
    double err = first.error;
    heap.push(first);
    int subdivisions = 0;
    while (err > std::max(s.abs_tol, s.rel_tol * detail::err_norm(total))) {
        if (subdivisions >= s.max_subdivisions)
            throw SubdivisionLimit("tolerance not reached after " + std::to_string(subdivisions) +
                                   " subdivisions (error estimate " + std::to_string(err) + ")");
        Interval<T> worst = heap.top();
        heap.pop();
        const double m = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15<T>(f, worst.a, m);
        auto right = detail::gk15<T>(f, m, worst.b);
        total = detail::difference(total, worst.value);
        detail::accumulate(total, left.value);
        detail::accumulate(total, right.value);
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
        if (subdivisions % 64 == 0) {
            // re-sum to keep the running error free of cancellation drift
            err = 0.0;
            auto copy = heap;
            while (!copy.empty()) {
                err += copy.top().error;
                copy.pop();
            }
        }
    }
    return total;
}

// Throws ClearanceViolation if a segment of the path comes within
// path.clearance of an exclusion point, or if consecutive nodes coincide.
void check_path(const ComplexPath& path, std::span<const cplx> exclusion);

// Line integral of f along the polyline.
cplx integrate_path(const std::function<cplx(cplx)>& f, const ComplexPath& path,
                    const QuadSettings& s = {}, std::span<const cplx> exclusion = {});

// Integral over [a,b] of f with an inverse square-root singularity at a,
// computed with u = a + t^2.
double integrate_sqrt_singular(const std::function<double(double)>& f, double a, double b,
                               const QuadSettings& s = {});

// Same, with f(u, u - a) so the integrand can use the exact offset t^2.
double integrate_sqrt_singular(const std::function<double(double, double)>& f, double a, double b,
                               const QuadSettings& s = {});

enum class TailMap { Reciprocal, ReciprocalSquare };

// Integral of f over [a, inf). p is the declared decay exponent of f.
double integrate_tail(const std::function<double(double)>& f, double a, double p,
                      const QuadSettings& s = {}, TailMap map = TailMap::Reciprocal);

}  // namespace minsurf
