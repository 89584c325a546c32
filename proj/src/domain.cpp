#include "qf/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qf/parallel.hpp"

namespace qf {

double box_distance(const Box& a, const Box& b, int n)
{
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto i = std::size_t(k);
        const double d = std::max({0.0, b.lo[i] - a.hi[i], a.lo[i] - b.hi[i]});
        s += d * d;
    }
    return std::sqrt(s);
}

DomainSpec DomainSpec::intervals(std::vector<std::pair<double, double>> parts)
{
    DomainSpec d;
    d.n_ = 1;
    std::sort(parts.begin(), parts.end());
    d.parts_ = std::move(parts);
    for (const auto& [a, b] : d.parts_) {
        d.gamma_.push_back({{a, 0.0}, {a, 0.0}});
        d.gamma_.push_back({{b, 0.0}, {b, 0.0}});
    }
    d.validate();
    return d;
}

DomainSpec DomainSpec::polygon(std::vector<Point> vertices)
{
    DomainSpec d;
    d.n_ = 2;
    d.vertices_ = std::move(vertices);
    const std::size_t V = d.vertices_.size();
    for (std::size_t i = 0; i < V; ++i) {
        const Point& a = d.vertices_[i];
        const Point& b = d.vertices_[(i + 1) % V];
        d.gamma_.push_back({{std::min(a[0], b[0]), std::min(a[1], b[1])}, {std::max(a[0], b[0]), std::max(a[1], b[1])}});
    }
    d.validate();
    return d;
}

DomainSpec DomainSpec::square(double lo, double hi) { return polygon({{lo, lo}, {hi, lo}, {hi, hi}, {lo, hi}}); }

DomainSpec DomainSpec::l_shape(double lo, double hi)
{
    const double c = 0.5 * (lo + hi);
    return polygon({{lo, lo}, {hi, lo}, {hi, c}, {c, c}, {c, hi}, {lo, hi}});
}

DomainSpec DomainSpec::from_json(int n, const std::string& kind, const nlohmann::json& params)
{
    try {
        if (n == 1) {
            require(kind == "intervals" || kind == "interval", ErrorKind::DomainInvalid, "1-D domains are intervals");
            std::vector<std::pair<double, double>> parts;
            if (kind == "interval")
                parts.emplace_back(params.at(0).get<double>(), params.at(1).get<double>());
            else
                for (const auto& p : params) parts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
            return intervals(std::move(parts));
        }
        if (kind == "square") return square(params.at(0).get<double>(), params.at(1).get<double>());
        if (kind == "l_shape") return l_shape(params.at(0).get<double>(), params.at(1).get<double>());
        require(kind == "polygon", ErrorKind::DomainInvalid, "unknown domain kind " + kind);
        std::vector<Point> v;
        for (const auto& p : params) v.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        return polygon(std::move(v));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::DomainInvalid, std::string("bad domain parameters: ") + e.what());
    }
}

void DomainSpec::validate() const
{
    if (n_ == 1) {
        require(!parts_.empty(), ErrorKind::DomainInvalid, "empty domain");
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            require(parts_[i].first < parts_[i].second, ErrorKind::DomainInvalid, "interval with lo >= hi");
            if (i > 0)
                require(parts_[i - 1].second < parts_[i].first, ErrorKind::DomainInvalid, "intervals overlap or touch");
        }
        return;
    }
    require(vertices_.size() >= 4, ErrorKind::DomainInvalid, "polygon needs at least four vertices");
    for (const Box& e : gamma_)
        require((e.lo[0] == e.hi[0]) != (e.lo[1] == e.hi[1]), ErrorKind::DomainInvalid,
                "polygon edges must be axis-aligned and nondegenerate");
}

bool DomainSpec::contains(const Point& x) const
{
    if (n_ == 1) {
        for (const auto& [a, b] : parts_)
            if (a < x[0] && x[0] < b) return true;
        return false;
    }
    if (boundary_distance(x) == 0.0) return false;
    bool inside = false;
    for (const Box& e : gamma_) {
        if (e.lo[0] != e.hi[0]) continue;  // horizontal edges never cross a horizontal ray
        if (x[1] >= e.lo[1] && x[1] < e.hi[1] && x[0] < e.lo[0]) inside = !inside;
    }
    return inside;
}

double DomainSpec::boundary_distance(const Box& b) const
{
    double d = std::numeric_limits<double>::infinity();
    for (const Box& e : gamma_) d = std::min(d, box_distance(b, e, n_));
    return d;
}

double DomainSpec::boundary_distance(const Point& x) const { return boundary_distance(Box{x, x}); }

bool DomainSpec::box_inside(const Box& b) const
{
    if (n_ == 1) {
        for (const auto& [a, c] : parts_)
            if (a <= b.lo[0] && b.hi[0] <= c) return true;
        return false;
    }
    for (const Box& e : gamma_) {
        bool cross = true;
        for (int k = 0; k < 2; ++k) {
            const auto i = std::size_t(k);
            if (e.lo[i] == e.hi[i])
                cross = cross && b.lo[i] < e.lo[i] && e.lo[i] < b.hi[i];
            else
                cross = cross && e.lo[i] < b.hi[i] && b.lo[i] < e.hi[i];
        }
        if (cross) return false;
    }
    return contains({0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])});
}

Box DomainSpec::bounds() const
{
    Box b{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
          {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
    for (const Box& e : gamma_)
        for (int k = 0; k < n_; ++k) {
            const auto i = std::size_t(k);
            b.lo[i] = std::min(b.lo[i], e.lo[i]);
            b.hi[i] = std::max(b.hi[i], e.hi[i]);
        }
    if (n_ == 1) b.lo[1] = b.hi[1] = 0.0;
    return b;
}

std::vector<char> DomainSpec::mask(const GridSpec& g) const
{
    require(g.n == n_, ErrorKind::GridMismatch, "domain and grid dimensions differ");
    std::vector<char> m(std::size_t(g.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) m[std::size_t(i)] = contains(g.point(i));
    return m;
}

nlohmann::json DomainSpec::to_json() const
{
    if (n_ == 1) {
        nlohmann::json p = nlohmann::json::array();
        for (const auto& [a, b] : parts_) p.push_back({a, b});
        return {{"kind", "intervals"}, {"params", p}};
    }
    nlohmann::json p = nlohmann::json::array();
    for (const auto& v : vertices_) p.push_back({v[0], v[1]});
    return {{"kind", "polygon"}, {"params", p}};
}

Box WhitneyCube::box(int n) const
{
    const double side = std::ldexp(1.0, -J);
    Box b;
    for (int k = 0; k < n; ++k) {
        b.lo[std::size_t(k)] = side * double(M[std::size_t(k)]);
        b.hi[std::size_t(k)] = side * double(M[std::size_t(k)] + 1);
    }
    return b;
}

nlohmann::json WhitneyCover::to_json(const DomainSpec& omega) const
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cubes) {
        const double d = omega.boundary_distance(c.box(n));
        arr.push_back({{"J", c.J},
                       {"M", std::vector<long>(c.M.begin(), c.M.begin() + n)},
                       {"dist_lower", d},
                       {"dist_upper", d + std::sqrt(double(n)) * std::ldexp(1.0, -c.J)}});
    }
    return arr;
}

WhitneyCover whitney_decompose(const DomainSpec& omega, int K, int J_max, const GridSpec& g)
{
    require(K >= 1 && J_max >= 0, ErrorKind::SpecInvalid, "Whitney parameters need K >= 1 and J_max >= 0");
    require(g.n == omega.n(), ErrorKind::GridMismatch, "domain and grid dimensions differ");
    const int n = omega.n();
    const Box bb = omega.bounds();
    for (int k = 0; k < n; ++k)
        require(bb.lo[std::size_t(k)] > -0.5 * g.L && bb.hi[std::size_t(k)] < 0.5 * g.L, ErrorKind::DomainInvalid,
                "domain leaves the box");
    WhitneyCover cover;
    cover.n = n;
    cover.K = K;
    cover.J_max = J_max;

    auto visit = [&](auto&& self, const WhitneyCube& q) -> void {
        const Box b = q.box(n);
        const double d = omega.boundary_distance(b);
        const Point c{0.5 * (b.lo[0] + b.hi[0]), 0.5 * (b.lo[1] + b.hi[1])};
        if (d > 0.0 && !omega.contains(c)) return;  // entirely outside
        if (d > 0.0 && d >= K * std::ldexp(1.0, -q.J)) {
            cover.cubes.push_back(q);
            return;
        }
        if (q.J == J_max) return;
        for (long a = 0; a < 2; ++a)
            for (long e = 0; e < (n == 2 ? 2 : 1); ++e)
                self(self, WhitneyCube{q.J + 1, {2 * q.M[0] + a, n == 2 ? 2 * q.M[1] + e : 0}});
    };
    const long x0 = long(std::floor(bb.lo[0])), x1 = long(std::ceil(bb.hi[0])) - 1;
    const long y0 = n == 2 ? long(std::floor(bb.lo[1])) : 0, y1 = n == 2 ? long(std::ceil(bb.hi[1])) - 1 : 0;
    for (long a = x0; a <= x1; ++a)
        for (long e = y0; e <= y1; ++e) visit(visit, WhitneyCube{0, {a, e}});
    std::sort(cover.cubes.begin(), cover.cubes.end(), [](const WhitneyCube& a, const WhitneyCube& b) {
        return std::tie(a.J, a.M) < std::tie(b.J, b.M);
    });
    require(!cover.cubes.empty(), ErrorKind::ResolutionExceeded, "no Whitney cube fits at this J_max");

    const auto inside = omega.mask(g);
    std::size_t gap = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!inside[std::size_t(i)]) continue;
        const Point x = g.point(i);
        bool hit = false;
        for (const auto& q : cover.cubes) {
            const Box b = q.box(n);
            bool in = true;
            for (int k = 0; k < n; ++k) in = in && x[std::size_t(k)] >= b.lo[std::size_t(k)] && x[std::size_t(k)] < b.hi[std::size_t(k)];
            if (in) {
                hit = true;
                break;
            }
        }
        gap += !hit;
    }
    cover.uncovered_measure = double(gap) * std::pow(g.h(), n);
    return cover;
}

namespace {

struct BumpJet {
    double v = 0.0;
    std::array<double, 2> d{0.0, 0.0};
    std::array<double, 3> dd{0.0, 0.0, 0.0};  // xx, yy, xy
};

// exp(-1/(1-u^2)) and its first two u-derivatives
std::array<double, 3> bump1(double u)
{
    if (!(std::abs(u) < 1.0)) return {0.0, 0.0, 0.0};
    const double w = 1.0 - u * u;
    const double b = std::exp(-1.0 / w);
    const double g = -2.0 * u / (w * w);
    return {b, b * g, b * (g * g - 2.0 / (w * w) - 8.0 * u * u / (w * w * w))};
}

BumpJet cube_bump(const WhitneyCube& q, double dilation, const Point& x, int n)
{
    const double side = std::ldexp(1.0, -q.J);
    const double a = 0.5 * dilation * side;
    std::array<std::array<double, 3>, 2> f{{{1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}};
    for (int k = 0; k < n; ++k) {
        const auto i = std::size_t(k);
        const double c = side * (double(q.M[i]) + 0.5);
        auto r = bump1((x[i] - c) / a);
        f[i] = {r[0], r[1] / a, r[2] / (a * a)};
    }
    BumpJet j;
    j.v = f[0][0] * f[1][0];
    j.d = {f[0][1] * f[1][0], f[0][0] * f[1][1]};
    j.dd = {f[0][2] * f[1][0], f[0][0] * f[1][2], f[0][1] * f[1][1]};
    return j;
}

DomainPartition build_partition(const WhitneyCover& cover, const GridSpec& g, double dilation)
{
    const int n = g.n;
    DomainPartition part;
    part.grid = g;
    part.cover = cover;
    part.dilation = dilation;
    Vec<double> sum = Vec<double>::Zero(g.size());
    for (const auto& q : cover.cubes) {
        PartitionPiece p;
        const double side = std::ldexp(1.0, -q.J);
        for (int k = 0; k < n; ++k) {
            const auto i = std::size_t(k);
            const double c = side * (double(q.M[i]) + 0.5), a = 0.5 * dilation * side;
            const long i0 = std::max(0L, long(std::ceil((c - a + 0.5 * g.L) / g.h())));
            const long i1 = std::min(long(g.N) - 1, long(std::floor((c + a + 0.5 * g.L) / g.h())));
            p.lo[i] = i0;
            p.extent[i] = std::max(0L, i1 - i0 + 1);
        }
        p.v.resize(p.extent[0] * p.extent[1]);
        for (long a = 0; a < p.extent[0]; ++a)
            for (long b = 0; b < p.extent[1]; ++b) {
                const Eigen::Index flat = g.flat(int(p.lo[0] + a), int(p.lo[1] + b));
                const double v = cube_bump(q, dilation, g.point(flat), n).v;
                p.v[a * p.extent[1] + b] = v;
                sum[flat] += v;
            }
        part.pieces.push_back(std::move(p));
    }
    for (const auto& q : cover.cubes) {
        const Box b = q.box(n);
        std::array<long, 2> i0{0, 0}, i1{0, 0};
        for (int k = 0; k < n; ++k) {
            const auto a = std::size_t(k);
            i0[a] = std::max(0L, long(std::ceil((b.lo[a] + 0.5 * g.L) / g.h())));
            i1[a] = std::min(long(g.N) - 1, long(std::floor((b.hi[a] + 0.5 * g.L) / g.h())));
        }
        for (long a = i0[0]; a <= i1[0]; ++a)
            for (long e = i0[1]; e <= i1[1]; ++e)
                require(sum[g.flat(int(a), int(e))] > 0.0, ErrorKind::CoverageGap,
                        "partition sum vanishes on the covered region");
    }
    for (auto& p : part.pieces)
        for (long a = 0; a < p.extent[0]; ++a)
            for (long b = 0; b < p.extent[1]; ++b) {
                double& v = p.v[a * p.extent[1] + b];
                if (v != 0.0) v /= sum[g.flat(int(p.lo[0] + a), int(p.lo[1] + b))];
            }
    return part;
}

} // namespace

RealField DomainPartition::piece(std::size_t i) const
{
    const PartitionPiece& p = pieces.at(i);
    RealField out(grid);
    for (long a = 0; a < p.extent[0]; ++a)
        for (long b = 0; b < p.extent[1]; ++b) out[grid.flat(int(p.lo[0] + a), int(p.lo[1] + b))] = p.v[a * p.extent[1] + b];
    return out;
}

RealField DomainPartition::total() const
{
    RealField out(grid);
    for (const auto& p : pieces)
        for (long a = 0; a < p.extent[0]; ++a)
            for (long b = 0; b < p.extent[1]; ++b) out[grid.flat(int(p.lo[0] + a), int(p.lo[1] + b))] += p.v[a * p.extent[1] + b];
    return out;
}

DomainPartition build_domain_partition(const WhitneyCover& cover, const DomainSpec& omega, const GridSpec& g,
                                       double dilation)
{
    require(omega.n() == g.n && cover.n == g.n, ErrorKind::GridMismatch, "domain, cover and grid dimensions differ");
    require(dilation > 1.0 && dilation <= 2.0, ErrorKind::SpecInvalid, "partition dilation must lie in (1, 2]");
    return build_partition(cover, g, dilation);
}

PartitionConstants partition_constants(const DomainPartition& part, int samples)
{
    const int n = part.grid.n;
    const auto& cubes = part.cover.cubes;
    const double dil = part.dilation;
    auto dilated = [&](const WhitneyCube& q) {
        Box b = q.box(n);
        const double pad = 0.5 * (dil - 1.0) * std::ldexp(1.0, -q.J);
        for (int k = 0; k < n; ++k) {
            b.lo[std::size_t(k)] -= pad;
            b.hi[std::size_t(k)] += pad;
        }
        return b;
    };
    std::vector<Box> boxes;
    for (const auto& q : cubes) boxes.push_back(dilated(q));
    std::vector<std::array<double, 3>> per_cube(cubes.size(), {0.0, 0.0, 0.0});
    parallel_for(cubes.size(), [&](std::size_t ci) {
        std::vector<std::size_t> nb;
        for (std::size_t o = 0; o < cubes.size(); ++o)
            if (box_distance(boxes[ci], boxes[o], n) == 0.0) nb.push_back(o);
        const Box& B = boxes[ci];
        const int sy = n == 2 ? samples : 1;
        for (int a = 0; a < samples; ++a)
            for (int e = 0; e < sy; ++e) {
                const Point x{B.lo[0] + (a + 0.5) / samples * (B.hi[0] - B.lo[0]),
                              n == 2 ? B.lo[1] + (e + 0.5) / samples * (B.hi[1] - B.lo[1]) : 0.0};
                BumpJet S;
                for (std::size_t o : nb) {
                    const BumpJet t = cube_bump(cubes[o], dil, x, n);
                    S.v += t.v;
                    for (int k = 0; k < 2; ++k) S.d[std::size_t(k)] += t.d[std::size_t(k)];
                    for (int k = 0; k < 3; ++k) S.dd[std::size_t(k)] += t.dd[std::size_t(k)];
                }
                if (!(S.v > 0.0)) continue;
                const BumpJet b = cube_bump(cubes[ci], dil, x, n);
                const double rho = b.v / S.v;
                std::array<double, 2> g{};
                for (int k = 0; k < n; ++k)
                    g[std::size_t(k)] = (b.d[std::size_t(k)] * S.v - b.v * S.d[std::size_t(k)]) / (S.v * S.v);
                auto second = [&](int k, int l, int slot) {
                    const auto K = std::size_t(k), L = std::size_t(l), s = std::size_t(slot);
                    return b.dd[s] / S.v - (b.d[K] * S.d[L] + b.d[L] * S.d[K]) / (S.v * S.v) - b.v * S.dd[s] / (S.v * S.v) +
                           2.0 * b.v * S.d[K] * S.d[L] / (S.v * S.v * S.v);
                };
                double h2 = std::abs(second(0, 0, 0));
                if (n == 2) h2 = std::max({h2, std::abs(second(1, 1, 1)), std::abs(second(0, 1, 2))});
                const double side = std::ldexp(1.0, -cubes[ci].J);
                auto& c = per_cube[ci];
                c[0] = std::max(c[0], std::abs(rho));
                c[1] = std::max(c[1], std::hypot(g[0], g[1]) * side);
                c[2] = std::max(c[2], h2 * side * side);
            }
    });
    PartitionConstants out;
    for (std::size_t ci = 0; ci < cubes.size(); ++ci) {
        const int J = cubes[ci].J;
        auto it = std::find(out.levels.begin(), out.levels.end(), J);
        if (it == out.levels.end()) {
            out.levels.push_back(J);
            out.c.push_back(per_cube[ci]);
        } else {
            auto& c = out.c[std::size_t(it - out.levels.begin())];
            for (int k = 0; k < 3; ++k) c[std::size_t(k)] = std::max(c[std::size_t(k)], per_cube[ci][std::size_t(k)]);
        }
    }
    return out;
}

double rloc_norm(const RealField& f, const SpaceSpec& spec, const DomainPartition& part, const ResolutionOfUnity& res)
{
    spec.validate();
    require(spec.family == Family::F, ErrorKind::SpecInvalid, "refined localization norms use F-spaces");
    require(spec.s > spec.sigma_p(f.grid().n), ErrorKind::HypothesisViolated, "hypothesis s > σ^n_p violated");
    require(f.grid() == part.grid, ErrorKind::GridMismatch, "field and partition grids differ");
    std::vector<double> vals(part.pieces.size(), 0.0);
    parallel_for(part.pieces.size(), [&](std::size_t i) {
        RealField g = part.piece(i);
        g.values() = g.values().cwiseProduct(f.values());
        if (sup_norm(g) > 0.0) vals[i] = reference_norm(g, spec, res);
    });
    double acc = 0.0;
    for (double v : vals) acc = std::isinf(spec.p) ? std::max(acc, v) : acc + std::pow(v, spec.p);
    return std::isinf(spec.p) ? acc : std::pow(acc, 1.0 / spec.p);
}

std::vector<DomainIndex> domain_index_set(const WhitneyCover& cover, int j_max)
{
    std::vector<DomainIndex> out;
    const int n = cover.n;
    for (const auto& q : cover.cubes)
        for (int j = q.J; j <= j_max; ++j) {
            const long r = 1L << (j - q.J);
            for (long a = 0; a < r; ++a)
                for (long b = 0; b < (n == 2 ? r : 1); ++b)
                    out.push_back({j, {q.M[0] * r + a, n == 2 ? q.M[1] * r + b : 0}});
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::shared_ptr<const DomainIndexing> domain_indexing(const WhitneyCover& cover, const DomainSpec& omega,
                                                      const GridSpec& g, int j_max)
{
    auto set = std::make_shared<std::vector<DomainIndex>>(domain_index_set(cover, j_max));
    auto idx = std::make_shared<DomainIndexing>();
    const int n = cover.n;
    idx->contains = [set, n](int j, const Lattice& m) {
        return std::binary_search(set->begin(), set->end(), DomainIndex{j, {m[0], n == 2 ? m[1] : 0}});
    };
    idx->mask = omega.mask(g);
    return idx;
}

namespace {

Box quark_box(const QuarkSystem& sys, int j, const Lattice& m)
{
    const double lo = sys.quark().profile.support_lo(), hi = sys.quark().profile.support_hi();
    Box b;
    for (int k = 0; k < sys.n(); ++k) {
        b.lo[std::size_t(k)] = std::ldexp(double(m[std::size_t(k)]) + lo, -j);
        b.hi[std::size_t(k)] = std::ldexp(double(m[std::size_t(k)]) + hi, -j);
    }
    return b;
}

Box host_box(const WhitneyCube& q, int K, int n)
{
    Box b = q.box(n);
    const double pad = K * std::ldexp(1.0, -q.J);
    for (int k = 0; k < n; ++k) {
        b.lo[std::size_t(k)] -= pad;
        b.hi[std::size_t(k)] += pad;
    }
    return b;
}

bool box_within(const Box& inner, const Box& outer, int n)
{
    for (int k = 0; k < n; ++k) {
        const auto i = std::size_t(k);
        if (inner.lo[i] < outer.lo[i] - 1e-12 || inner.hi[i] > outer.hi[i] + 1e-12) return false;
    }
    return true;
}

} // namespace

bool quark_hosted(const QuarkSystem& sys, const WhitneyCover& cover, const DomainSpec& omega, int j, const Lattice& m)
{
    const int n = sys.n();
    const Box qb = quark_box(sys, j, m);
    bool hosted = false;
    for (const auto& q : cover.cubes)
        if (q.J <= j && box_within(qb, host_box(q, cover.K, n), n)) {
            hosted = true;
            break;
        }
    return hosted && omega.box_inside(qb);
}

CoefficientTensor domain_analyze(const RealField& f, const QuarkSystem& sys, const DomainPartition& part,
                                 const DomainSpec& omega, int beta_max, int j_max)
{
    require(f.grid() == sys.grid() && part.grid == sys.grid(), ErrorKind::GridMismatch, "grids differ");
    require(beta_max <= sys.beta_max() && j_max <= sys.j_max(), ErrorKind::LevelOutOfRange, "truncation beyond the system");
    const int n = sys.n();
    const auto& cubes = part.cover.cubes;
    const int K = part.cover.K;
    const double lo = sys.quark().profile.support_lo(), hi = sys.quark().profile.support_hi();

    struct Entry {
        MultiIndex beta;
        int j;
        Lattice m;
        cplx v;
    };
    std::vector<std::vector<Entry>> per_cube(cubes.size());
    parallel_for(cubes.size(), [&](std::size_t ci) {
        const WhitneyCube& q = cubes[ci];
        if (q.J > j_max) return;
        RealField g = part.piece(ci);
        g.values() = g.values().cwiseProduct(f.values());
        if (sup_norm(g) == 0.0) return;
        const FrequencyField F = dft_forward(g);
        const Box host = host_box(q, K, n);
        for (const MultiIndex& beta : sys.betas()) {
            if (beta.order() > beta_max) continue;
            for (int j = q.J; j <= j_max; ++j) {
                const Slab s = positive_slab(F, sys, beta, j, j == q.J ? Branch::F : Branch::M);
                std::array<long, 2> m0{0, 0}, m1{0, 0};
                for (int k = 0; k < n; ++k) {
                    const auto i = std::size_t(k);
                    m0[i] = long(std::ceil(std::ldexp(host.lo[i], j) - lo - 1e-9));
                    m1[i] = long(std::floor(std::ldexp(host.hi[i], j) - hi + 1e-9));
                }
                for (long a = m0[0]; a <= m1[0]; ++a)
                    for (long b = m0[1]; b <= m1[1]; ++b) {
                        const Lattice m{a, b};
                        if (!s.contains(m)) continue;
                        if (n == 2 && !omega.box_inside(quark_box(sys, j, m))) continue;
                        const cplx v = s.v[s.offset(m)];
                        if (v != cplx(0.0)) per_cube[ci].push_back({beta, j, m, v});
                    }
            }
        }
    });
    CoefficientTensor out(n);
    out.meta = {{"regime", "domain"}, {"beta_max", beta_max}, {"j_max", j_max}};
    for (const auto& entries : per_cube)
        for (const auto& e : entries) out.add(e.beta, e.j, e.m, e.v);
    project_real(out);
    return out;
}

ComplexField domain_synthesize(const CoefficientTensor& lambda, const QuarkSystem& sys, const WhitneyCover& cover,
                               const DomainSpec& omega)
{
    std::vector<DomainIndex> checked;
    int j_top = 0;
    lambda.for_each([&](const MultiIndex&, int j, const Lattice& m, cplx) {
        j_top = std::max(j_top, j);
        const DomainIndex key{j, m};
        if (std::binary_search(checked.begin(), checked.end(), key)) return;
        require(quark_hosted(sys, cover, omega, j, m), ErrorKind::IndexNotInDomain,
                "coefficient index is not hosted by any Whitney cube");
        checked.insert(std::upper_bound(checked.begin(), checked.end(), key), key);
    });
    const TruncationConfig cfg{sys.beta_max(), sys.j_max(), Regime::Positive, 0};
    return synthesize(lambda, sys, cfg);
}

double distance_weighted_lp(const RealField& f, const DomainSpec& omega, double s, double p)
{
    const GridSpec& g = f.grid();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        if (!omega.contains(x) || f[i] == 0.0) continue;
        const double d = std::min(omega.boundary_distance(x), 1.0);
        const double v = std::abs(f[i]) * std::pow(d, -s);
        acc = std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
    }
    return std::isinf(p) ? acc : std::pow(acc * std::pow(g.h(), g.n), 1.0 / p);
}

DomainPartition unit_lattice_partition(const GridSpec& g)
{
    WhitneyCover cover;
    cover.n = g.n;
    cover.K = 0;
    cover.J_max = 0;
    const long lo = long(std::ceil(-0.5 * g.L)), hi = long(std::floor(0.5 * g.L)) - 1;
    for (long a = lo; a <= hi; ++a)
        for (long b = (g.n == 2 ? lo : 0); b <= (g.n == 2 ? hi : 0); ++b) cover.cubes.push_back({0, {a, b}});
    return build_partition(cover, g, 1.5);
}

LocalizationReport localization_check(const std::vector<RealField>& corpus, const SpaceSpec& spec,
                                      const ResolutionOfUnity& res)
{
    LocalizationReport rep;
    if (corpus.empty()) return rep;
    const DomainPartition part = unit_lattice_partition(corpus.front().grid());
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& f : corpus) {
        const double top = sup_norm(f);
        std::vector<double> vals(part.pieces.size(), 0.0);
        parallel_for(part.pieces.size(), [&](std::size_t i) {
            RealField g = part.piece(i);
            g.values() = g.values().cwiseProduct(f.values());
            // pieces below round-off of the input carry no information
            if (sup_norm(g) > 1e-16 * top) vals[i] = reference_norm(g, spec, res);
        });
        double acc = 0.0;
        for (double v : vals) acc = std::isinf(spec.p) ? std::max(acc, v) : acc + std::pow(v, spec.p);
        LocalizationRow r;
        r.reference = reference_norm(f, spec, res);
        r.localized = std::isinf(spec.p) ? acc : std::pow(acc, 1.0 / spec.p);
        r.ratio = r.localized > 0.0 ? r.reference / r.localized : 0.0;
        if (r.localized > 0.0) {
            lo = std::min(lo, r.ratio);
            hi = std::max(hi, r.ratio);
        }
        rep.rows.push_back(r);
    }
    rep.spread = hi > 0.0 ? hi / lo : 0.0;
    return rep;
}

} // namespace qf
