#include "qf/quark_system.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <limits>

#include <unsupported/Eigen/FFT>

namespace qf {

namespace {

double unit_bump(double u)
{
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::exp(-1.0 / (u * (1.0 - u)));
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

} // namespace

double BumpProfile::support_lo() const
{
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& c : parts) lo = std::min(lo, c.lo);
    return lo;
}

double BumpProfile::support_hi() const
{
    double hi = 0.0;
    for (const auto& c : parts) hi = std::max(hi, c.hi);
    return hi;
}

double BumpProfile::raw(double t) const
{
    double v = 0.0;
    for (const auto& c : parts) v += c.weight * unit_bump((t - c.lo) / (c.hi - c.lo));
    return v;
}

double BumpProfile::normalized(double t) const
{
    const double b = raw(t);
    if (b == 0.0) return 0.0;
    double s = 0.0;
    const long m0 = long(std::floor(t - support_hi())), m1 = long(std::ceil(t - support_lo()));
    for (long m = m0; m <= m1; ++m) s += raw(t - double(m));
    return b / s;
}

BumpProfile default_bump() { return BumpProfile{}; }

BumpProfile wide_bump(double width)
{
    BumpProfile p;
    p.id = "wide-" + std::to_string(int(width));
    p.parts = {{0.05, 0.05 + width, 1.0}};
    return p;
}

double QuarkTemplate::axis(double t, int b) const
{
    const double k1 = profile.normalized(t);
    if (k1 == 0.0 || b == 0) return k1;
    return std::pow(std::ldexp(t, -J), b) * k1;
}

double QuarkTemplate::eval(const Point& y, const MultiIndex& beta) const
{
    double v = axis(y[0], beta.c[0]);
    if (grid.n == 2 && v != 0.0) v *= axis(y[1], beta.c[1]);
    return v;
}

QuarkTemplate build_base_bump(const GridSpec& g, const BumpProfile& profile)
{
    // diameter of the tensor support, so the default 2-D grid qualifies
    const double diameter = std::sqrt(double(g.n)) * (profile.support_hi() - profile.support_lo());
    require(diameter / g.h() >= 32.0, ErrorKind::GridTooCoarse,
            "bump support spans fewer than 32 grid samples");
    QuarkTemplate t;
    t.grid = g;
    t.profile = profile;
    t.support_radius = profile.support_hi() * std::sqrt(double(g.n));
    const double lr = std::log2(t.support_radius);
    t.J = 0;
    while (!(lr < t.J - 0.05)) ++t.J;
    t.eps = t.J - lr;
    const MultiIndex zero{{0, 0}, g.n};
    t.k = RealField::sample(g, [&](const Point& x) { return t.eval(x, zero); });
    return t;
}

double bump_slope(const BumpProfile& p)
{
    const double d = 1e-5;
    double s = 0.0;
    for (double t = p.support_lo(); t <= p.support_hi(); t += 1e-3)
        s = std::max(s, std::abs(p.normalized(t + d) - p.normalized(t - d)) / (2 * d));
    return s;
}

QuarkTemplate build_small_slope_bump(const GridSpec& g, double slope_bound)
{
    for (int w = 2; w <= 64; ++w) {
        const BumpProfile p = wide_bump(double(w));
        if (bump_slope(p) <= slope_bound) return build_base_bump(g, p);
    }
    fail(ErrorKind::NoConvergence, "no flattened bump reaches the requested slope bound");
}

double partition_defect(const QuarkTemplate& t)
{
    const GridSpec& g = t.grid;
    Vec<double> axis_sum(g.N);
    const double lo = t.profile.support_lo(), hi = t.profile.support_hi();
    for (int i = 0; i < g.N; ++i) {
        const double x = g.coord(i);
        double s = 0.0;
        for (long m = long(std::floor(x - hi)); m <= long(std::ceil(x - lo)); ++m)
            s += t.profile.normalized(x - double(m));
        axis_sum[i] = s;
    }
    double worst = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = g.index(i);
        const double v = g.n == 1 ? axis_sum[k[0]] : axis_sum[k[0]] * axis_sum[k[1]];
        worst = std::max(worst, std::abs(v - 1.0));
    }
    return worst;
}

double omega_profile(double x) { return cutoff(x, 2.0, pi - 0.01); }

cplx OmegaAxis::eval(double eta) const
{
    // sum_m c_m e^{-i m eta} by a running power of e^{-i eta}
    const cplx z = std::polar(1.0, -eta);
    cplx zm = std::polar(1.0, double(M_max) * eta);
    cplx acc = 0.0;
    for (int m = -M_max; m <= M_max; ++m) {
        acc += coeff[std::size_t(m + M_max)] * zm;
        zm *= z;
    }
    return acc;
}

OmegaAxis build_omega_axis(int order, int J, int /*n*/, int M_max, int samples)
{
    OmegaAxis ax;
    ax.order = order;
    ax.M_max = M_max;
    double fact = 1.0;
    for (int k = 2; k <= order; ++k) fact *= k;
    const cplx ib = std::pow(cplx(0.0, 1.0), order);
    const cplx pref = ib * std::ldexp(1.0, J * order) / (2.0 * pi * fact);
    std::vector<cplx> a(static_cast<std::size_t>(samples)), out;
    for (int p = 0; p < samples; ++p) {
        const double x = -pi + 2.0 * pi * p / samples;
        a[std::size_t(p)] = pref * std::pow(x, order) * omega_profile(x);
    }
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    fft.inv(out, a);
    const double c = std::sqrt(2.0 * pi) / samples;
    ax.coeff.resize(std::size_t(2 * M_max + 1));
    double total = 0.0;
    for (int m = -M_max; m <= M_max; ++m) {
        const cplx v = out[std::size_t(((m % samples) + samples) % samples)] * c * ((m & 1) ? -1.0 : 1.0);
        ax.coeff[std::size_t(m + M_max)] = v;
        total += std::abs(v);
    }
    const double shell = std::abs(ax.coeff.front()) + std::abs(ax.coeff.back());
    ax.shell_ratio = total > 0.0 ? shell / total : 0.0;
    return ax;
}

QuarkSystem QuarkSystem::build(const GridSpec& g, const SystemConfig& cfg)
{
    QuarkSystem s;
    s.cfg_ = cfg;
    s.quark_ = cfg.small_slope ? build_small_slope_bump(g, cfg.slope_bound) : build_base_bump(g, cfg.profile);
    s.cfg_.profile = s.quark_.profile;
    const int lim = g.max_level();
    s.j_max_ = cfg.j_max < 0 ? lim : cfg.j_max;
    require(s.j_max_ <= lim, ErrorKind::GridTooCoarse, "j_max exceeds the grid Nyquist limit");
    require(cfg.beta_max >= 0, ErrorKind::SpecInvalid, "beta_max must be nonnegative");
    const double cells = g.N / g.L;
    require(std::abs(cells - std::round(cells)) < 1e-12 && std::has_single_bit(unsigned(std::lround(cells))) &&
                std::lround(cells) >= (1L << s.j_max_),
            ErrorKind::SpecInvalid, "grid spacing must be a dyadic fraction no coarser than 2^-j_max");

    s.betas_ = enumerate_multi_indices(g.n, cfg.beta_max);
    for (int b = 0; b <= cfg.beta_max; ++b) {
        s.omega_.push_back(build_omega_axis(b, s.quark_.J, g.n, cfg.M_max));
        s.shell_ratio_ = std::max(s.shell_ratio_, s.omega_.back().shell_ratio);
    }
    s.omega_table_.resize(std::size_t(cfg.beta_max + 1));
    for (int b = 0; b <= cfg.beta_max; ++b)
        for (int j = 0; j <= s.j_max_; ++j) {
            Vec<cplx> t = Vec<cplx>::Zero(g.N);
            for (int k = 0; k < g.N; ++k) {
                const double eta = std::ldexp(g.freq(k), -j);
                if (phi0_axis(eta) != 0.0) t[k] = s.omega_[std::size_t(b)].eval(eta);
            }
            s.omega_table_[std::size_t(b)].push_back(std::move(t));
        }
    const double shell_total = g.n * s.shell_ratio_;
    require(shell_total <= 1e-12, ErrorKind::TruncationInsufficient,
            "lattice-sum shell at M_max contributes more than 1e-12 relatively");

    for (const MultiIndex& beta : s.betas_) {
        DualTemplate d;
        d.grid = g;
        d.beta = beta;
        d.omega_truncation = cfg.M_max;
        const ComplexField F = dft_inverse({g, s.template_spectrum(beta, 0, Branch::F)});
        const ComplexField M = dft_inverse({g, s.template_spectrum(beta, 0, Branch::M)});
        d.imag_F = F.values().imag().cwiseAbs().maxCoeff();
        d.imag_M = M.values().imag().cwiseAbs().maxCoeff();
        require(std::max(d.imag_F, d.imag_M) < 1e-10, ErrorKind::ComplexField,
                "dual template has a significant imaginary part");
        d.phi_F = real_part(F);
        d.phi_M = real_part(M);
        const FrequencyField back = dft_forward(d.phi_M);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const auto k = g.index(i);
            const double r = std::hypot(g.freq(k[0]), g.n == 2 ? g.freq(k[1]) : 0.0);
            if (r <= 0.5) d.low_band_leak = std::max(d.low_band_leak, std::abs(back.coeff[i]));
        }
        s.duals_.push_back(std::move(d));
    }

    // radius beyond which |Phi^0_M| stays under 1e-12 of its sup (torus distance)
    const RealField& p0 = s.duals_.front().phi_M;
    const double sup = sup_norm(p0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (std::abs(p0[i]) < 1e-12 * sup) continue;
        const Point x = g.point(i);
        s.tail_radius_ = std::max(s.tail_radius_, std::hypot(x[0], x[1]));
    }
    return s;
}

std::size_t QuarkSystem::beta_slot(const MultiIndex& beta) const
{
    for (std::size_t i = 0; i < betas_.size(); ++i)
        if (betas_[i] == beta) return i;
    fail(ErrorKind::IndexOutOfRange, "multi-index beyond the built table");
}

const DualTemplate& QuarkSystem::dual(const MultiIndex& beta) const { return duals_[beta_slot(beta)]; }

// per-axis factor phi~(c xi/2^j) Omega_b(+-xi/2^j) with c = 1 (A) or 2 (B)
Vec<cplx> QuarkSystem::axis_symbol(int order, int j, Branch br, bool negate) const
{
    require(j >= 0 && j <= j_max_, ErrorKind::LevelOutOfRange, "level beyond the built tables");
    const GridSpec& g = grid();
    const Vec<cplx>& om = omega_table_[std::size_t(order)][std::size_t(j)];
    const double c = br == Branch::F ? 1.0 : 2.0;
    // Omega_b(-eta) = (-1)^b Omega_b(eta)
    const double sign = (negate && (order & 1)) ? -1.0 : 1.0;
    Vec<cplx> out = Vec<cplx>::Zero(g.N);
    for (int k = 0; k < g.N; ++k) {
        const double cut = phi0_axis(c * std::ldexp(g.freq(k), -j));
        if (cut != 0.0) out[k] = (cut * sign) * om[k];
    }
    return out;
}

Vec<cplx> QuarkSystem::analysis_symbol(const MultiIndex& beta, int j, Branch br) const
{
    require(beta.order() <= cfg_.beta_max, ErrorKind::IndexOutOfRange, "beta beyond the built table");
    const GridSpec& g = grid();
    const Vec<cplx> a0 = axis_symbol(beta.c[0], j, Branch::F, false);
    Vec<cplx> b0;
    if (br == Branch::M) b0 = axis_symbol(beta.c[0], j, Branch::M, false);
    if (g.n == 1) return br == Branch::F ? a0 : Vec<cplx>(a0 - b0);
    const Vec<cplx> a1 = axis_symbol(beta.c[1], j, Branch::F, false);
    Vec<cplx> b1;
    if (br == Branch::M) b1 = axis_symbol(beta.c[1], j, Branch::M, false);
    Vec<cplx> out(g.size());
    for (int k0 = 0; k0 < g.N; ++k0)
        for (int k1 = 0; k1 < g.N; ++k1) {
            cplx v = a0[k0] * a1[k1];
            if (br == Branch::M) v -= b0[k0] * b1[k1];
            out[Eigen::Index(k0) * g.N + k1] = v;
        }
    return out;
}

Vec<cplx> QuarkSystem::template_spectrum(const MultiIndex& beta, int j, Branch br) const
{
    const double sign = (beta.order() & 1) ? -1.0 : 1.0;
    return analysis_symbol(beta, j, br) * (sign * std::ldexp(1.0, -j * n()));
}

std::pair<long, long> QuarkSystem::m_window(int j) const
{
    const double half = std::ldexp(0.5 * grid().L, j);
    return {long(std::ceil(-half)), long(std::ceil(half)) - 1};
}

std::vector<AxisQuark> QuarkSystem::axis_quarks(int order, int j) const
{
    const GridSpec& g = grid();
    const double h = g.h();
    const double lo = quark_.profile.support_lo(), hi = quark_.profile.support_hi();
    const auto [m0, m1] = m_window(j);
    std::vector<AxisQuark> out;
    out.reserve(std::size_t(m1 - m0 + 1));
    for (long m = m0; m <= m1; ++m) {
        AxisQuark q;
        q.m = m;
        const double xlo = std::ldexp(double(m) + lo, -j), xhi = std::ldexp(double(m) + hi, -j);
        const long i0 = long(std::ceil((xlo + 0.5 * g.L) / h)), i1 = long(std::floor((xhi + 0.5 * g.L) / h));
        q.start = i0;
        for (long i = i0; i <= i1; ++i) {
            const double t = std::ldexp(double(i) * h - 0.5 * g.L, j) - double(m);
            q.v.push_back(quark_.axis(t, order));
        }
        out.push_back(std::move(q));
    }
    return out;
}

RealField QuarkSystem::quark_eval(const MultiIndex& beta, int j, const Lattice& m) const
{
    require(beta.order() <= cfg_.beta_max && j >= 0 && j <= j_max_, ErrorKind::IndexOutOfRange,
            "quark index beyond the truncation");
    const GridSpec& g = grid();
    for (int a = 0; a < g.n; ++a) {
        const double xlo = std::ldexp(double(m[std::size_t(a)]) + quark_.profile.support_lo(), -j);
        const double xhi = std::ldexp(double(m[std::size_t(a)]) + quark_.profile.support_hi(), -j);
        require(xlo >= -0.5 * g.L && xhi <= 0.5 * g.L, ErrorKind::SupportOverflow, "quark support leaves the box");
    }
    return RealField::sample(g, [&](const Point& x) {
        const Point y{std::ldexp(x[0], j) - double(m[0]), std::ldexp(x[1], j) - double(m[1])};
        return quark_.eval(y, beta);
    });
}

RealField QuarkSystem::dual_eval(const MultiIndex& beta, int j, const Lattice& m, DualMode mode) const
{
    require(beta.order() <= cfg_.beta_max && j >= 0 && j <= j_max_, ErrorKind::IndexOutOfRange,
            "dual index beyond the truncation");
    const GridSpec& g = grid();
    Vec<cplx> spec = template_spectrum(beta, j, j == 0 ? Branch::F : Branch::M);
    const Point y{std::ldexp(double(m[0]), -j), std::ldexp(double(m[1]), -j)};
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = g.index(i);
        spec[i] *= std::polar(1.0, -(g.freq(k[0]) * y[0] + (g.n == 2 ? g.freq(k[1]) * y[1] : 0.0)));
    }
    RealField out = real_part(dft_inverse({g, spec}));
    if (mode == DualMode::Strict) {
        const double sup = sup_norm(out);
        double far = 0.0;
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const Point x = g.point(i);
            double d = 0.0;
            for (int a = 0; a < g.n; ++a) {
                double u = std::fmod(std::abs(x[std::size_t(a)] - y[std::size_t(a)]), g.L);
                d = std::max(d, std::min(u, g.L - u));
            }
            if (d >= 0.375 * g.L) far = std::max(far, std::abs(out[i]));
        }
        require(far < 1e-10 * sup, ErrorKind::TailOverflow, "dual tail reaches the box boundary");
    }
    return out;
}

nlohmann::json QuarkSystem::manifest() const
{
    const GridSpec& g = grid();
    nlohmann::json duals = nlohmann::json::array();
    for (const auto& d : duals_)
        duals.push_back({{"beta", std::vector<int>(d.beta.c.begin(), d.beta.c.begin() + g.n)},
                         {"phi_F", hex64(checksum(d.phi_F))},
                         {"phi_M", hex64(checksum(d.phi_M))}});
    return {{"n", g.n},
            {"N", g.N},
            {"L", g.L},
            {"J", quark_.J},
            {"eps", quark_.eps},
            {"beta_max", cfg_.beta_max},
            {"j_max", j_max_},
            {"M_max", cfg_.M_max},
            {"kappa", cfg_.kappa},
            {"profile_ids", {{"bump", quark_.profile.id}, {"cutoff", "exp-step[1,1.5]"}, {"omega", "exp-step[2,pi-0.01]"}}},
            {"checksums", {{"k", hex64(checksum(quark_.k))}, {"duals", duals}}}};
}

AxisProfile wide_axis_profile(const QuarkSystem& sys, int order)
{
    const GridSpec w = GridSpec::make(1, 65536, 32768.0);
    const OmegaAxis& om = sys.omega(order);
    Vec<cplx> a = Vec<cplx>::Zero(w.N), b = Vec<cplx>::Zero(w.N);
    for (int k = 0; k < w.N; ++k) {
        const double xi = w.freq(k);
        const double ca = phi0_axis(xi), cb = phi0_axis(2.0 * xi);
        if (ca == 0.0) continue;
        const cplx o = om.eval(-xi);
        a[k] = ca * o;
        b[k] = cb * o;
    }
    AxisProfile p;
    p.grid = w;
    p.A = dft_inverse({w, a}).values().real();
    p.B = dft_inverse({w, b}).values().real();
    return p;
}

namespace {

// central window of the wide profile, |x| <= R
struct Window {
    std::vector<double> x, A, B;
};

Window central(const AxisProfile& p, double R, int stride)
{
    Window w;
    for (int i = 0; i < p.grid.N; i += stride) {
        const double x = p.grid.coord(i);
        if (std::abs(x) > R) continue;
        w.x.push_back(x);
        w.A.push_back(p.A[i]);
        w.B.push_back(p.B[i]);
    }
    return w;
}

} // namespace

namespace {

// weights w[g][k] with sum_k w[g][k] f(k d) ~ f^{(g)}(0), nodes k = -2..2
std::vector<std::vector<double>> derivative_weights(int gmax, double d)
{
    constexpr int K = 5;
    Eigen::MatrixXd V(K, K);
    for (int r = 0; r < K; ++r)
        for (int k = 0; k < K; ++k) V(r, k) = std::pow((k - 2) * d, r);
    const Eigen::MatrixXd inv = V.inverse();
    std::vector<std::vector<double>> w(std::size_t(gmax) + 1, std::vector<double>(K));
    double fact = 1.0;
    for (int g = 0; g <= gmax; ++g) {
        if (g > 0) fact *= g;
        // derivative of the interpolant at 0 is g! times its x^g coefficient
        for (int k = 0; k < K; ++k) w[std::size_t(g)][std::size_t(k)] = fact * inv(k, g);
    }
    return w;
}

} // namespace

// Phi_M is band-limited, so its DFT at the lowest grid frequencies is its exact Fourier transform;
// moments are derivatives of that transform at the origin
MomentReport verify_moments(const QuarkSystem& sys, int gamma_max)
{
    require(gamma_max <= 4, ErrorKind::IndexOutOfRange, "moment order above 4 needs a wider stencil");
    const int n = sys.n();
    const GridSpec& g = sys.grid();
    const auto w = derivative_weights(gamma_max, 2.0 * pi / g.L);
    const double hn = std::pow(g.h(), n);
    MomentReport rep;
    for (const MultiIndex& beta : sys.betas()) {
        const RealField& phi = sys.dual(beta).phi_M;
        const Vec<double>& v = phi.values();
        const double sup = v.cwiseAbs().maxCoeff();
        const double l1 = v.cwiseAbs().sum() * hn;
        double r = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v[i]) <= 1e-3 * sup) continue;
            const Point x = g.point(i);
            r = std::max(r, std::hypot(x[0], n == 2 ? x[1] : 0.0));
        }
        const FrequencyField F = dft_forward(phi);
        auto at = [&](int k0, int k1) {
            const int i0 = (k0 + g.N) % g.N, i1 = (k1 + g.N) % g.N;
            return F.coeff[g.flat(i0, i1)];
        };
        for (const MultiIndex& gam : enumerate_multi_indices(n, gamma_max)) {
            cplx d = 0.0;
            if (n == 1) {
                for (int k = -2; k <= 2; ++k) d += w[std::size_t(gam.c[0])][std::size_t(k + 2)] * at(k, 0);
            } else {
                for (int k0 = -2; k0 <= 2; ++k0)
                    for (int k1 = -2; k1 <= 2; ++k1)
                        d += w[std::size_t(gam.c[0])][std::size_t(k0 + 2)] *
                             w[std::size_t(gam.c[1])][std::size_t(k1 + 2)] * at(k0, k1);
            }
            const double m = std::pow(2.0 * pi, 0.5 * n) * std::abs(d);
            MomentRow row{beta, gam, m, 1e-8 * l1 * std::pow(r, gam.order())};
            rep.worst_ratio = std::max(rep.worst_ratio, std::abs(m) / row.bound);
            rep.rows.push_back(row);
        }
    }
    rep.pass = rep.worst_ratio <= 1.0;
    return rep;
}

DecayReport verify_decay(const QuarkSystem& sys, const std::vector<double>& kappas, int N)
{
    const int n = sys.n();
    DecayReport rep;
    rep.N = N;
    rep.kappas = kappas;
    std::vector<AxisProfile> prof;
    for (int b = 0; b <= sys.beta_max(); ++b) prof.push_back(wide_axis_profile(sys, b));
    for (const MultiIndex& beta : sys.betas()) {
        double sup = 0.0;
        if (n == 1) {
            const AxisProfile& p = prof[std::size_t(beta.c[0])];
            for (int i = 0; i < p.grid.N; ++i) {
                const double x = p.grid.coord(i);
                sup = std::max(sup, std::abs(p.A[i] - p.B[i]) * std::pow(1.0 + std::abs(x), N));
            }
        } else {
            const Window w0 = central(prof[std::size_t(beta.c[0])], 1024.0, 2);
            const Window w1 = central(prof[std::size_t(beta.c[1])], 1024.0, 2);
            for (std::size_t a = 0; a < w0.x.size(); ++a)
                for (std::size_t b = 0; b < w1.x.size(); ++b) {
                    const double v = w0.A[a] * w1.A[b] - w0.B[a] * w1.B[b];
                    sup = std::max(sup, std::abs(v) * std::pow(1.0 + std::hypot(w0.x[a], w1.x[b]), N));
                }
        }
        rep.rows.push_back({beta, std::log2(sup)});
    }
    auto slope_over = [&](double kappa, int k0, int k1) {
        std::vector<double> xs, ys;
        for (int k = k0; k <= k1; ++k) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& row : rep.rows)
                if (row.beta.order() == k) best = std::max(best, row.log2_sup + kappa * k);
            if (std::isfinite(best)) {
                xs.push_back(k);
                ys.push_back(best);
            }
        }
        return xs.size() >= 2 ? fit_slope(xs, ys) : 0.0;
    };
    rep.pass = true;
    for (double kappa : kappas) {
        rep.slope_1_4.push_back(slope_over(kappa, 1, std::min(4, sys.beta_max())));
        rep.slope_2_max.push_back(slope_over(kappa, 2, sys.beta_max()));
        if (rep.slope_2_max.back() > 0.0) rep.pass = false;
    }

    // quark side: sup |d^a (2^-J t)^b k_1| by central differences, kappa = eps/2
    const QuarkTemplate& q = sys.quark();
    const double kq = 0.5 * q.eps, d = 1e-4;
    std::vector<std::array<double, 3>> s(std::size_t(sys.beta_max() + 1), {0, 0, 0});
    for (int b = 0; b <= sys.beta_max(); ++b)
        for (double t = q.profile.support_lo(); t <= q.profile.support_hi(); t += 1e-3) {
            const double f0 = q.axis(t, b), fp = q.axis(t + d, b), fm = q.axis(t - d, b);
            auto& row = s[std::size_t(b)];
            row[0] = std::max(row[0], std::abs(f0));
            row[1] = std::max(row[1], std::abs(fp - fm) / (2 * d));
            row[2] = std::max(row[2], std::abs(fp - 2 * f0 + fm) / (d * d));
        }
    std::vector<double> xs, ys;
    for (int k = 0; k <= sys.beta_max(); ++k) {
        double best = 0.0;
        for (const MultiIndex& beta : sys.betas()) {
            if (beta.order() != k) continue;
            for (const MultiIndex& al : enumerate_multi_indices(n, 2)) {
                double v = s[std::size_t(beta.c[0])][std::size_t(al.c[0])];
                if (n == 2) v *= s[std::size_t(beta.c[1])][std::size_t(al.c[1])];
                best = std::max(best, v);
            }
        }
        xs.push_back(k);
        ys.push_back(std::log2(best) + kq * k);
    }
    rep.quark_slope.push_back(fit_slope(xs, ys));
    return rep;
}

} // namespace qf
