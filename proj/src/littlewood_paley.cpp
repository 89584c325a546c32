#include "qf/littlewood_paley.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace qf {

double smooth_step(double t)
{
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - t));
    const double b = std::exp(-1.0 / t);
    return a / (a + b);
}

double cutoff(double t, double a, double b)
{
    const double u = std::abs(t);
    if (u <= a) return 1.0;
    if (u >= b) return 0.0;
    return smooth_step((u - a) / (b - a));
}

double phi0(const Point& xi, int n)
{
    double r = phi0_axis(xi[0]);
    if (n == 2) r *= phi0_axis(xi[1]);
    return r;
}

double phi_level(const Point& xi, int n, int j)
{
    if (j == 0) return phi0(xi, n);
    const double a = std::ldexp(1.0, -j), b = std::ldexp(1.0, -j + 1);
    return phi0({xi[0] * a, xi[1] * a}, n) - phi0({xi[0] * b, xi[1] * b}, n);
}

double SpaceSpec::sigma_p(int n) const { return n * (std::max(1.0 / p, 1.0) - 1.0); }

double SpaceSpec::sigma_pq(int n) const { return n * (std::max({1.0 / p, 1.0 / q, 1.0}) - 1.0); }

void SpaceSpec::validate() const
{
    require(p > 0.0 && q > 0.0, ErrorKind::SpecInvalid, "p and q must be positive");
    require(std::isfinite(s) && std::isfinite(delta) && std::isfinite(kappa), ErrorKind::SpecInvalid,
            "s, delta, kappa must be finite");
    require(!(family == Family::F && std::isinf(p) && !std::isinf(q)), ErrorKind::SpecInvalid,
            "F-spaces with p = inf require q = inf");
}

std::string SpaceSpec::describe() const
{
    std::ostringstream os;
    os << (family == Family::B ? 'B' : 'F') << "(s=" << s << ",p=" << p << ",q=" << q << ",delta=" << delta
       << ",kappa=" << kappa << ")";
    return os.str();
}

const Vec<double>& ResolutionOfUnity::level(int j) const
{
    require(j >= 0 && j <= j_max, ErrorKind::LevelOutOfRange, "level outside the resolution");
    return levels[std::size_t(j)];
}

ResolutionOfUnity build_resolution(const GridSpec& g, int j_max)
{
    const int lim = g.max_level();
    require(lim >= 2, ErrorKind::GridTooCoarse, "grid admits fewer than 3 dyadic levels");
    if (j_max < 0) j_max = lim;
    require(j_max <= lim, ErrorKind::GridTooCoarse, "requested levels exceed the grid Nyquist limit");

    ResolutionOfUnity r;
    r.grid = g;
    r.j_max = j_max;
    // separable: tabulate per-axis cutoffs at each dyadic scale
    std::vector<Vec<double>> axis(std::size_t(j_max + 1), Vec<double>(g.N));
    for (int j = 0; j <= j_max; ++j)
        for (int k = 0; k < g.N; ++k) axis[std::size_t(j)][k] = phi0_axis(std::ldexp(g.freq(k), -j));
    auto tensor = [&](int j) {
        const Vec<double>& a = axis[std::size_t(j)];
        if (g.n == 1) return Vec<double>(a);
        Vec<double> t(g.size());
        for (int k0 = 0; k0 < g.N; ++k0)
            for (int k1 = 0; k1 < g.N; ++k1) t[Eigen::Index(k0) * g.N + k1] = a[k0] * a[k1];
        return t;
    };
    r.phi0 = tensor(0);
    r.levels.push_back(r.phi0);
    Vec<double> prev = r.phi0;
    for (int j = 1; j <= j_max; ++j) {
        Vec<double> cur = tensor(j);
        r.levels.push_back(cur - prev);
        prev = std::move(cur);
    }
    return r;
}

ComplexField lp_block(const ComplexField& f, const ResolutionOfUnity& res, int j)
{
    require(f.grid() == res.grid, ErrorKind::GridMismatch, "field and resolution grids differ");
    FrequencyField F = dft_forward(f);
    F.coeff = F.coeff.cwiseProduct(res.level(j).cast<cplx>());
    return dft_inverse(F);
}

ComplexField lp_block(const RealField& f, const ResolutionOfUnity& res, int j)
{
    return lp_block(to_complex(f), res, j);
}

double weighted_lp(const Vec<double>& a, const GridSpec& g, double p)
{
    if (a.size() == 0) return 0.0;
    if (std::isinf(p)) return a.maxCoeff();
    return std::pow(a.array().pow(p).sum() * std::pow(g.h(), g.n), 1.0 / p);
}

namespace {

Vec<double> weight_samples(double delta, const GridSpec& g)
{
    Vec<double> w(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) w[i] = weight_value(delta, g.point(i), g.n);
    return w;
}

} // namespace

NormReport reference_norm_report(const ComplexField& f, const SpaceSpec& spec, const ResolutionOfUnity& res)
{
    spec.validate();
    require(f.grid() == res.grid, ErrorKind::GridMismatch, "field and resolution grids differ");
    const GridSpec& g = f.grid();
    const FrequencyField F = dft_forward(f);
    const bool weighted = spec.delta != 0.0;
    const Vec<double> w = weighted ? weight_samples(spec.delta, g) : Vec<double>();

    NormReport rep;
    Vec<double> acc = Vec<double>::Zero(spec.family == Family::F ? g.size() : 0);
    double bsum = 0.0;
    for (int j = 0; j <= res.j_max; ++j) {
        FrequencyField Fj{g, F.coeff.cwiseProduct(res.level(j).cast<cplx>())};
        Vec<double> a = dft_inverse(Fj).values().cwiseAbs();
        if (weighted) a = a.cwiseProduct(w);
        const double scale = std::pow(2.0, j * spec.s);
        a *= scale;
        const double lp = weighted_lp(a, g, spec.p);
        rep.per_level.push_back(lp);
        if (spec.family == Family::B) {
            if (std::isinf(spec.q))
                bsum = std::max(bsum, lp);
            else
                bsum += std::pow(lp, spec.q);
        } else {
            if (std::isinf(spec.q))
                acc = acc.cwiseMax(a);
            else
                acc += a.array().pow(spec.q).matrix();
        }
    }
    if (spec.family == Family::B) {
        rep.value = std::isinf(spec.q) ? bsum : std::pow(bsum, 1.0 / spec.q);
    } else {
        if (!std::isinf(spec.q)) acc = acc.array().pow(1.0 / spec.q).matrix();
        rep.value = weighted_lp(acc, g, spec.p);
    }
    return rep;
}

double reference_norm(const ComplexField& f, const SpaceSpec& spec, const ResolutionOfUnity& res)
{
    return reference_norm_report(f, spec, res).value;
}

double reference_norm(const RealField& f, const SpaceSpec& spec, const ResolutionOfUnity& res)
{
    return reference_norm(to_complex(f), spec, res);
}

WeightReport weight_eval(double delta, const GridSpec& g)
{
    WeightReport rep;
    rep.w = RealField(g, weight_samples(delta, g));
    // closed-form derivatives: d_i w = delta x_i (1+|x|^2)^{delta/2-1},
    // d_i d_k w = delta (1+|x|^2)^{delta/2-2} ((delta-2) x_i x_k + [i=k](1+|x|^2))
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        const double r2 = x[0] * x[0] + (g.n == 2 ? x[1] * x[1] : 0.0);
        const double b = 1.0 + r2;
        for (int a = 0; a < g.n; ++a) {
            rep.c_grad = std::max(rep.c_grad, std::abs(delta * x[a]) / b);
            for (int c = 0; c < g.n; ++c) {
                const double d2 = delta / (b * b) * ((delta - 2.0) * x[a] * x[c] + (a == c ? b : 0.0));
                rep.c_hess = std::max(rep.c_hess, std::abs(d2));
            }
        }
    }
    // grid-pair maximum; 2-D grids are subsampled to keep the pair count near 16M
    const double alpha = std::abs(delta);
    const int stride = g.n == 1 ? 1 : std::max(1, g.N / 64);
    std::vector<Point> pts;
    std::vector<double> wv;
    for (int i0 = 0; i0 < g.N; i0 += stride) {
        if (g.n == 1) {
            pts.push_back(g.point(i0));
        } else {
            for (int i1 = 0; i1 < g.N; i1 += stride) pts.push_back(g.point(g.flat(i0, i1)));
        }
    }
    for (const Point& p : pts) wv.push_back(weight_value(delta, p, g.n));
    double c = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = 0; b < pts.size(); ++b) {
            const double d0 = pts[a][0] - pts[b][0], d1 = pts[a][1] - pts[b][1];
            c = std::max(c, wv[a] / (wv[b] * std::pow(1.0 + d0 * d0 + d1 * d1, 0.5 * alpha)));
        }
    rep.c_shift = c;
    return rep;
}

} // namespace qf
