#include "minsurf/mesh.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <unordered_map>

#include "minsurf/classical.hpp"

namespace minsurf {

namespace {

constexpr cplx I(0.0, 1.0);

// Snap values that should be exact branch points or real.
cplx tidy(const CurveParams& c, cplx z) {
    for (const cplx& r : c.roots())
        if (std::abs(z - r) < 1e-12 * (1.0 + c.sigma)) return r;
    if (z.imag() < 0.0 && z.imag() > -1e-12) z.imag(0.0);
    return z;
}

double root_on_unit(const std::function<double(double)>& f, double fa, double fb) {
    std::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14; };
    auto [lo, hi] = boost::math::tools::toms748_solve(f, 0.0, 1.0, fa, fb, tol, iters);
    return 0.5 * (lo + hi);
}

}  // namespace

cplx DomainMap::operator()(cplx z) const {
    const double a = sigma;
    const double e2 = e * e;
    const double S = std::sqrt(4.0 * (a - 1) * (a - 1) * e2 + (1 + a) * (1 + a) * (e2 - 1) * (e2 - 1));
    const cplx num = -a * a * (1 + e2) * (z - 1.0) - 2.0 * a * (e2 - 3) * z - (1 + e2) * (1.0 + z) +
                     S * (1.0 + a * (z - 1.0) + z);
    const cplx den = 2.0 * S - 2.0 * ((1 + a) * (e2 - 1) - 2.0 * (a - 1) * z);
    return num / den;
}

IsometryOp IsometryOp::then(const IsometryOp& next) const {
    IsometryOp r;
    r.linear = next.linear * linear;
    r.offset = next.linear * offset + next.offset;
    return r;
}

TriMesh sample_fundamental(double sigma, double e, int nr, int nt, const SampleOptions& opt) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    if (!(e > 0.0 && e < 1.0)) throw DomainError("e must lie in (0, 1)");
    if (nr < 2 || nt < 2) throw DomainError("grid needs at least 2x2 samples");
    const Immersion imm(sigma, 1e-2, opt.quad);
    const CurveParams& c = imm.curve();
    const DomainMap f{sigma, e};

    std::vector<cplx> z(static_cast<std::size_t>(nr) * nt);
    for (int i = 0; i < nr; ++i) {
        const double r = e + (1.0 - e) * i / (nr - 1);
        for (int j = 0; j < nt; ++j) {
            const double t = static_cast<double>(j) / (nt - 1);
            cplx zeta = r * std::exp(I * (std::numbers::pi * std::pow(t, opt.warp)));
            if (j == 0) zeta = r;
            if (j == nt - 1) zeta = -r;
            cplx v = tidy(c, f(zeta));
            if (j == 0 || j == nt - 1) v = tidy(c, cplx(v.real(), 0.0));
            z[i * nt + j] = v;
        }
    }
    auto idx = [nt](int i, int j) { return i * nt + j; };
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nt; ++j) {
            if (i + 1 < nr && z[idx(i, j)] == z[idx(i + 1, j)])
                throw DegenerateCell("samples coincide at grid (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (j + 1 < nt && z[idx(i, j)] == z[idx(i, j + 1)])
                throw DegenerateCell("samples coincide at grid (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }

    std::vector<Immersed> pts(z.size());
    // row 0 sequentially, then every column outward from it
    pts[idx(0, 0)] = imm.at(z[idx(0, 0)]);
    for (int j = 1; j < nt; ++j) pts[idx(0, j)] = imm.step(pts[idx(0, j - 1)], z[idx(0, j)]);
    for (int j = 0; j < nt; ++j)
        for (int i = 1; i < nr; ++i) pts[idx(i, j)] = imm.step(pts[idx(i - 1, j)], z[idx(i, j)]);

    TriMesh m;
    m.sigma = sigma;
    m.patch_ops = {IsometryOp{}};
    for (const auto& p : pts) {
        m.vertices.push_back(p.position);
        m.normals.push_back(gauss_map(weierstrass_forms(c, p.end)));
        m.params.push_back(p.end);
        m.provenance.push_back({sigma, 0});
    }
    for (int i = 0; i + 1 < nr; ++i)
        for (int j = 0; j + 1 < nt; ++j) {
            const int a = idx(i, j), b = idx(i + 1, j), cc = idx(i + 1, j + 1), d = idx(i, j + 1);
            m.faces.push_back({a, b, cc});
            m.faces.push_back({a, cc, d});
        }
    // wind the faces along the Gauss map
    int agree = 0;
    for (const auto& fc : m.faces) {
        const Vec3 n = (m.vertices[fc[1]] - m.vertices[fc[0]]).cross(m.vertices[fc[2]] - m.vertices[fc[0]]);
        const Vec3 avg = m.normals[fc[0]] + m.normals[fc[1]] + m.normals[fc[2]];
        agree += n.dot(avg) >= 0.0 ? 1 : -1;
    }
    if (agree < 0)
        for (auto& fc : m.faces) std::swap(fc[1], fc[2]);
    return m;
}

ExtensionData extension_ops(double sigma, const QuadSettings& s) {
    const Immersion imm(sigma, 1e-2, s);
    ExtensionData d;
    d.c = imm.at(cplx(0.0, std::sqrt(sigma))).position;
    d.t0 = imm.at(cplx(-sigma, 0.0)).position;
    const Eigen::Matrix3d rot = Eigen::Vector3d(-1, 1, -1).asDiagonal();
    const Eigen::Matrix3d mirror = Eigen::Vector3d(1, -1, 1).asDiagonal();
    d.ops[0] = {rot, Vec3(2 * d.c[0], 0.0, 2 * d.c[2])};
    d.ops[1] = {mirror, Vec3::Zero()};
    d.ops[2] = {rot, Vec3::Zero()};
    d.ops[3] = {Eigen::Matrix3d::Identity(), 2.0 * d.t0};
    return d;
}

namespace {

void append_image(TriMesh& dst, const TriMesh& src, const IsometryOp& op, int patch_shift) {
    const int base = static_cast<int>(dst.vertices.size());
    const bool flip = op.reverses_orientation();
    for (std::size_t k = 0; k < src.vertices.size(); ++k) {
        dst.vertices.push_back(op.apply(src.vertices[k]));
        dst.normals.push_back(op.apply_normal(src.normals[k]));
        dst.params.push_back(src.params[k]);
        dst.provenance.push_back({src.provenance[k].sigma, src.provenance[k].patch + patch_shift});
    }
    for (auto fc : src.faces) {
        if (flip) std::swap(fc[1], fc[2]);
        dst.faces.push_back({fc[0] + base, fc[1] + base, fc[2] + base});
    }
}

}  // namespace

TriMesh extend(const TriMesh& mesh, const std::array<IsometryOp, 4>& ops, int copies) {
    if (copies < 0) throw DomainError("copies must be non-negative");
    TriMesh cur = mesh;
    int patches = static_cast<int>(cur.patch_ops.size());
    for (int step = 0; step < 3; ++step) {
        TriMesh next = cur;
        append_image(next, cur, ops[step], patches);
        for (int p = 0; p < patches; ++p) next.patch_ops.push_back(cur.patch_ops[p].then(ops[step]));
        patches *= 2;
        cur = std::move(next);
    }
    TriMesh out = cur;
    IsometryOp shift{};
    for (int k = 1; k <= copies; ++k) {
        shift = shift.then(ops[3]);
        append_image(out, cur, shift, k * patches);
        for (int p = 0; p < patches; ++p) out.patch_ops.push_back(cur.patch_ops[p].then(shift));
    }
    return out;
}

std::vector<Vec3> slice(const TriMesh& mesh, double height, double vertex_tol) {
    if (mesh.params.size() != mesh.vertices.size()) throw DomainError("mesh carries no curve parameters");
    const Immersion imm(mesh.sigma);
    const CurveParams& c = imm.curve();
    std::vector<Vec3> out;
    for (const auto& v : mesh.vertices)
        if (std::abs(v[2] - height) <= vertex_tol) out.push_back(v);
    std::set<std::pair<int, int>> edges;
    for (const auto& fc : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            int a = fc[k], b = fc[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
    auto is_branch = [&](cplx z) {
        for (const cplx& r : c.roots())
            if (z == r) return true;
        return false;
    };
    for (auto [a, b] : edges) {
        const double da = mesh.vertices[a][2] - height, db = mesh.vertices[b][2] - height;
        if (std::abs(da) <= vertex_tol || std::abs(db) <= vertex_tol || da * db > 0.0) continue;
        if (is_branch(mesh.params[a].z)) std::swap(a, b);
        const IsometryOp& op = mesh.patch_ops.at(mesh.provenance[a].patch);
        // undo the patch isometry to recover the fundamental-piece sample
        const Vec3 base = op.linear.transpose() * (mesh.vertices[a] - op.offset);
        const Immersed from{base, mesh.params[a]};
        const cplx za = mesh.params[a].z, zb = mesh.params[b].z;
        auto point = [&](double s) { return op.apply(imm.step(from, za + s * (zb - za)).position); };
        auto f = [&](double s) { return point(s)[2] - height; };
        const double s = root_on_unit(f, mesh.vertices[a][2] - height, mesh.vertices[b][2] - height);
        out.push_back(point(s));
    }
    return out;
}

CircleFit level_circle_fit(std::span<const Vec3> points, double height_tol) {
    if (points.size() < 5) throw Degenerate("circle fit needs at least 5 points");
    const double h = points[0][2];
    for (const auto& p : points)
        if (std::abs(p[2] - h) > height_tol) throw DomainError("points do not share a common height");
    const int n = static_cast<int>(points.size());
    Eigen::MatrixXd P(n, 2);
    for (int k = 0; k < n; ++k) P.row(k) << points[k][0], points[k][1];
    const Eigen::RowVector2d mean = P.colwise().mean();
    const Eigen::MatrixXd Q = P.rowwise() - mean;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Q.transpose() * Q / n);
    // spreads measured along the eigenvectors; the small eigenvalue itself
    // carries absolute noise of order eps * hi^2
    const double lo = (Q * es.eigenvectors().col(0)).norm() / std::sqrt(double(n));
    const double hi = (Q * es.eigenvectors().col(1)).norm() / std::sqrt(double(n));
    if (hi == 0.0 || hi < 1e-14 * (1.0 + mean.norm())) throw Degenerate("points coincide");
    CircleFit fit;
    auto as_line = [&]() {
        const Eigen::Vector2d normal = es.eigenvectors().col(0);
        fit.kind = CircleFit::Kind::Line;
        fit.center = mean.transpose();
        fit.radius = std::numeric_limits<double>::infinity();
        fit.residual = (Q * normal).cwiseAbs().maxCoeff();
        return fit;
    };
    if (lo <= 1e-9 * hi) return as_line();
    // algebraic fit x^2 + y^2 + D x + E y + F = 0 in centred coordinates
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) {
        A.row(k) << Q(k, 0), Q(k, 1), 1.0;
        b(k) = -(Q(k, 0) * Q(k, 0) + Q(k, 1) * Q(k, 1));
    }
    const Eigen::Vector3d x = A.colPivHouseholderQr().solve(b);
    const Eigen::Vector2d cen(-0.5 * x(0), -0.5 * x(1));
    const double r2 = cen.squaredNorm() - x(2);
    if (!(r2 > 0.0)) return as_line();
    const double r = std::sqrt(r2);
    if (r > 1e6 * hi) return as_line();
    fit.center = cen + mean.transpose();
    fit.radius = r;
    fit.residual = 0.0;
    for (int k = 0; k < n; ++k) fit.residual = std::max(fit.residual, std::abs((Q.row(k).transpose() - cen).norm() - r));
    return fit;
}

TriMesh weld(const TriMesh& mesh, double tol) {
    TriMesh out;
    out.sigma = mesh.sigma;
    out.patch_ops = mesh.patch_ops;
    std::map<std::array<long long, 3>, std::vector<int>> buckets;
    std::vector<int> remap(mesh.vertices.size());
    auto key = [&](const Vec3& v) {
        return std::array<long long, 3>{std::llround(v[0] / tol), std::llround(v[1] / tol), std::llround(v[2] / tol)};
    };
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        const Vec3& v = mesh.vertices[k];
        const auto kk = key(v);
        int found = -1;
        for (long long dx = -1; dx <= 1 && found < 0; ++dx)
            for (long long dy = -1; dy <= 1 && found < 0; ++dy)
                for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = buckets.find({kk[0] + dx, kk[1] + dy, kk[2] + dz});
                    if (it == buckets.end()) continue;
                    for (int cand : it->second)
                        if ((out.vertices[cand] - v).norm() <= tol) {
                            found = cand;
                            break;
                        }
                }
        if (found < 0) {
            found = static_cast<int>(out.vertices.size());
            out.vertices.push_back(v);
            out.normals.push_back(mesh.normals[k]);
            out.provenance.push_back(mesh.provenance[k]);
            if (!mesh.params.empty()) out.params.push_back(mesh.params[k]);
            buckets[kk].push_back(found);
        }
        remap[k] = found;
    }
    for (const auto& fc : mesh.faces) {
        std::array<int, 3> g{remap[fc[0]], remap[fc[1]], remap[fc[2]]};
        if (g[0] == g[1] || g[1] == g[2] || g[0] == g[2]) continue;
        out.faces.push_back(g);
    }
    return out;
}

std::size_t export_obj(const TriMesh& mesh, const std::filesystem::path& path) {
    std::string text;
    char buf[160];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v[0], v[1], v[2]);
        text += buf;
    }
    for (const auto& n : mesh.normals) {
        std::snprintf(buf, sizeof buf, "vn %.9g %.9g %.9g\n", n[0], n[1], n[2]);
        text += buf;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(buf, sizeof buf, "f %d//%d %d//%d %d//%d\n", f[0] + 1, f[0] + 1, f[1] + 1, f[1] + 1, f[2] + 1,
                      f[2] + 1);
        text += buf;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!os) throw IoError("write failed for " + path.string());
    return text.size();
}

std::size_t export_ply(const TriMesh& mesh, const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little, "PLY writer assumes a little-endian host");
    std::string out = "ply\nformat binary_little_endian 1.0\nelement vertex " + std::to_string(mesh.vertices.size()) +
                      "\nproperty float x\nproperty float y\nproperty float z\n"
                      "property float nx\nproperty float ny\nproperty float nz\n"
                      "element face " +
                      std::to_string(mesh.faces.size()) + "\nproperty list uchar int vertex_indices\nend_header\n";
    auto put = [&](const void* p, std::size_t n) { out.append(static_cast<const char*>(p), n); };
    for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
        float rec[6];
        for (int i = 0; i < 3; ++i) {
            rec[i] = static_cast<float>(mesh.vertices[k][i]);
            rec[3 + i] = static_cast<float>(mesh.normals[k][i]);
        }
        put(rec, sizeof rec);
    }
    for (const auto& f : mesh.faces) {
        const unsigned char three = 3;
        put(&three, 1);
        const std::int32_t idx[3] = {f[0], f[1], f[2]};
        put(idx, sizeof idx);
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw IoError("write failed for " + path.string());
    return out.size();
}

std::vector<Vec3> weierstrass_level_points(const Immersion& imm, double e, double height, int rays) {
    const DomainMap f{imm.curve().sigma, e};
    const int K = 48;
    std::vector<Vec3> pts;
    for (int j = 1; j <= rays; ++j) {
        const double t = static_cast<double>(j) / (rays + 1);
        std::vector<Immersed> ray;
        for (int k = 0; k <= K; ++k) {
            const double r = e + (1.0 - e) * k / K;
            const cplx z = f(r * std::exp(I * (std::numbers::pi * t)));
            ray.push_back(k == 0 ? imm.at(z) : imm.step(ray.back(), z));
        }
        for (int k = 0; k < K; ++k) {
            const double da = ray[k].position[2] - height, db = ray[k + 1].position[2] - height;
            if (da == 0.0) {
                pts.push_back(ray[k].position);
                continue;
            }
            if (da * db >= 0.0) continue;
            const cplx za = ray[k].end.z, zb = ray[k + 1].end.z;
            auto g = [&](double s) { return imm.step(ray[k], za + s * (zb - za)).position[2] - height; };
            const double s = root_on_unit(g, da, db);
            pts.push_back(imm.step(ray[k], za + s * (zb - za)).position);
        }
    }
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) pts.push_back(Vec3(pts[k][0], -pts[k][1], pts[k][2]));
    return pts;
}

Registration register_constructions(double lambda, int samples) {
    Registration reg;
    reg.lambda = lambda;
    reg.sigma = sigma_of_lambda(lambda);
    const RiemannParams rp = RiemannParams::make(lambda);
    const Immersion imm(reg.sigma);
    const ExtensionData ext = extension_ops(reg.sigma);
    // The neck sits at the S1 fixed point, a planar end at height 0.
    const double neck = ext.c[2];
    const double e = 0.02;
    std::vector<double> taus;
    for (int k = 0; k < samples; ++k) taus.push_back(0.7 * k / std::max(1, samples - 1));
    for (double tau : taus) {
        const double h = tau * rp.zeta;
        reg.classical_radii.push_back(std::sqrt(q_at_height(rp, h)));
        const auto pts = weierstrass_level_points(imm, e, neck * (1.0 - tau));
        const auto fit = level_circle_fit(pts);
        if (fit.kind != CircleFit::Kind::Circle) throw ConvergenceError("level set at the sampled height is not a circle");
        reg.weierstrass_radii.push_back(fit.radius);
    }
    // least-squares scale over radii and the neck-to-end spacing
    double num = rp.zeta * neck, den = neck * neck;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        num += reg.classical_radii[k] * reg.weierstrass_radii[k];
        den += reg.weierstrass_radii[k] * reg.weierstrass_radii[k];
    }
    reg.scale = num / den;
    reg.max_relative_error = std::abs(reg.scale * neck - rp.zeta) / rp.zeta;
    for (std::size_t k = 0; k < taus.size(); ++k)
        reg.max_relative_error = std::max(reg.max_relative_error,
                                          std::abs(reg.scale * reg.weierstrass_radii[k] - reg.classical_radii[k]) /
                                              reg.classical_radii[k]);
    return reg;
}

}  // namespace minsurf
