#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "minsurf/classical.hpp"
#include "minsurf/quad.hpp"

using namespace minsurf;

namespace {

ComplexPath square(cplx center, double half) {
    return {{center + cplx(half, -half), center + cplx(half, half), center + cplx(-half, half),
             center + cplx(-half, -half), center + cplx(half, -half)},
            0.0};
}

ComplexPath reversed_path(ComplexPath p) {
    std::reverse(p.nodes.begin(), p.nodes.end());
    return p;
}

}  // namespace

TEST(IntegratePath, PolynomialSegment) {
    const cplx v = integrate_path([](cplx z) { return z * z; }, {{0.0, 1.0}, 0.0});
    EXPECT_NEAR(std::abs(v - 1.0 / 3.0), 0.0, 1e-12);
}

TEST(IntegratePath, ResidueOfInverse) {
    const cplx v = integrate_path([](cplx z) { return 1.0 / z; }, square(0.0, 1.0));
    EXPECT_NEAR(std::abs(v - cplx(0, 2 * std::numbers::pi)), 0.0, 1e-9);
}

TEST(IntegratePath, ReversalNegates) {
    auto f = [](cplx z) { return std::exp(z) / (z - cplx(3, 1)); };
    const ComplexPath p{{cplx(0, 0), cplx(1, 2), cplx(-1, 1.5)}, 0.0};
    const cplx a = integrate_path(f, p), b = integrate_path(f, reversed_path(p));
    EXPECT_LT(std::abs(a + b), 1e-10);
}

TEST(IntegratePath, Additivity) {
    auto f = [](cplx z) { return std::sin(z) * z; };
    const cplx ab = integrate_path(f, {{cplx(0, 0), cplx(1, 1)}, 0.0});
    const cplx bc = integrate_path(f, {{cplx(1, 1), cplx(2, -1)}, 0.0});
    const cplx ac = integrate_path(f, {{cplx(0, 0), cplx(1, 1), cplx(2, -1)}, 0.0});
    EXPECT_LT(std::abs(ab + bc - ac), 1e-10);
}

TEST(IntegratePath, HomotopyIndependence) {
    // both paths pass above 0; f has a pole only at 0
    auto f = [](cplx z) { return std::exp(z) / z; };
    const std::array<cplx, 1> excl = {cplx(0)};
    ComplexPath p1{{cplx(-1, 0), cplx(-1, 1), cplx(1, 1), cplx(1, 0)}, 0.1};
    ComplexPath p2{{cplx(-1, 0), cplx(0, 3), cplx(1, 0)}, 0.1};
    const cplx a = integrate_path(f, p1, {}, excl), b = integrate_path(f, p2, {}, excl);
    EXPECT_LT(std::abs(a - b), 1e-9);
}

TEST(IntegratePath, CauchyClosedLoop) {
    const cplx v = integrate_path([](cplx z) { return std::exp(z) * std::cos(z); }, square(cplx(0.5, 0.5), 2.0));
    EXPECT_LT(std::abs(v), 1e-10);
}

TEST(IntegratePath, ClearanceViolation) {
    const std::array<cplx, 1> excl = {cplx(0)};
    ComplexPath p{{cplx(-1, 0.01), cplx(1, 0.01)}, 0.1};
    EXPECT_THROW(integrate_path([](cplx z) { return z; }, p, {}, excl), ClearanceViolation);
    ComplexPath dup{{cplx(0, 0), cplx(0, 0)}, 0.0};
    EXPECT_THROW(check_path(dup, {}), DomainError);
}

TEST(IntegratePath, NonFiniteIntegrand) {
    auto f = [](cplx z) { return z.real() > 0.5 ? cplx(std::nan("")) : z; };
    EXPECT_THROW(integrate_path(f, {{0.0, 1.0}, 0.0}), NonFinite);
}

TEST(IntegratePath, SubdivisionLimit) {
    QuadSettings s;
    s.max_subdivisions = 2;
    auto f = [](cplx z) { return std::sin(200.0 * z); };
    EXPECT_THROW(integrate_path(f, {{0.0, 3.0}, 0.0}, s), SubdivisionLimit);
}

TEST(SqrtSingular, InverseSquareRoot) {
    EXPECT_NEAR(integrate_sqrt_singular([](double u) { return 1.0 / std::sqrt(u); }, 0.0, 1.0), 2.0, 1e-12);
}

TEST(SqrtSingular, Constant) {
    EXPECT_NEAR(integrate_sqrt_singular([](double) { return 3.5; }, 1.0, 4.0), 10.5, 1e-12);
}

TEST(SqrtSingular, RadicandAgainstTruncatedQuadrature) {
    const double lambda = 1.0, a = q_min(lambda), b = 2.0;
    auto f = [&](double u) { return 1.0 / std::sqrt(u * u * u - u + lambda * u * u); };
    const double value = integrate_sqrt_singular(f, a, b);
    // Oracle: raw quadrature on [a + eps, b]; the missing piece behaves like
    // c sqrt(eps), so two offsets give a Richardson estimate.
    QuadSettings s;
    s.max_subdivisions = 20000;
    auto raw = [&](double eps) { return integrate_gk<double>(f, a + eps, b, s); };
    const double i1 = raw(1e-8), i4 = raw(4e-8);
    const double oracle = 2.0 * i1 - i4;
    EXPECT_NEAR(value, oracle, 1e-6);
}

TEST(Tail, PowerLaws) {
    EXPECT_NEAR(integrate_tail([](double u) { return std::pow(u, -1.5); }, 1.0, 1.5), 2.0, 1e-10);
    EXPECT_NEAR(integrate_tail([](double u) { return 1.0 / (u * u); }, 2.0, 2.0), 0.5, 1e-10);
    EXPECT_NEAR(integrate_tail([](double u) { return std::pow(u, -1.5); }, 1.0, 1.5, {}, TailMap::ReciprocalSquare), 2.0,
                1e-10);
}

TEST(Tail, DivergentExponent) {
    EXPECT_THROW(integrate_tail([](double u) { return 1.0 / u; }, 1.0, 1.0), Divergent);
    EXPECT_THROW(integrate_tail([](double u) { return 1.0 / std::sqrt(u); }, 1.0, 0.5), Divergent);
}

TEST(Tail, SlabHeightTwoSubstitutions) {
    const double lambda = 1.0, a = q_min(lambda);
    auto f = [&](double u) { return 0.5 / std::sqrt(u * u * u - u + lambda * u * u); };
    // split off the endpoint singularity, then compare both tail maps
    const double split = a + 1.0;
    const double head = integrate_sqrt_singular(f, a, split);
    const double t1 = integrate_tail(f, split, 1.5, {}, TailMap::Reciprocal);
    const double t2 = integrate_tail(f, split, 1.5, {}, TailMap::ReciprocalSquare);
    EXPECT_NEAR(t1, t2, 1e-8);
    EXPECT_GT(head + t1, 0.0);
    EXPECT_NEAR(head + t2, slab_height(lambda), 1e-8);
}

TEST(GaussKronrod, ArrayValued) {
    auto f = [](double t) { return std::array<cplx, 2>{cplx(t, 0), cplx(0, t * t)}; };
    const auto v = integrate_gk<std::array<cplx, 2>>(f, 0.0, 2.0);
    EXPECT_NEAR(std::abs(v[0] - 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(v[1] - cplx(0, 8.0 / 3.0)), 0.0, 1e-12);
}

TEST(GaussKronrod, Deterministic) {
    auto f = [](double t) { return std::exp(-t * t) * std::cos(5 * t); };
    EXPECT_EQ(integrate_gk<double>(f, -3.0, 4.0), integrate_gk<double>(f, -3.0, 4.0));
}
