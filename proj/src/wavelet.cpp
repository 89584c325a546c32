#include "qf/wavelet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "qf/parallel.hpp"

namespace qf {

namespace {

// Daubechies low-pass filters with u vanishing moments, minimum-phase root selection,
// obtained by spectral factorization of the Daubechies polynomial in 40-digit arithmetic
const std::vector<double>& daubechies(int u)
{
    static const std::vector<double> d2{0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103,
                                        -0.12940952255126038117};
    static const std::vector<double> d3{0.33267055295008261600, 0.80689150931109257649, 0.45987750211849157010,
                                        -0.13501102001025458870, -0.08544127388202666169, 0.03522629188570953660};
    static const std::vector<double> d4{0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788,
                                        -0.02798376941685985421, -0.18703481171909308408, 0.03084138183556076363,
                                        0.03288301166688519974, -0.01059740178506903211};
    switch (u) {
    case 2: return d2;
    case 3: return d3;
    case 4: return d4;
    default: fail(ErrorKind::SpecInvalid, "wavelet order must be 2, 3 or 4");
    }
}

long wrap(long i, long N) { return ((i % N) + N) % N; }

cplx m_filter(const std::vector<double>& c, double xi)
{
    cplx acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * std::polar(1.0, -double(k) * xi);
    return acc / std::sqrt(2.0);
}

} // namespace

double WaveletPair::eval(double t, bool mother) const
{
    const std::vector<double>& tab = mother ? psi : phi;
    if (!(t >= 0.0) || t > support()) return 0.0;
    const double pos = std::ldexp(t, R);
    const auto k = static_cast<std::size_t>(std::floor(pos));
    if (k + 1 >= tab.size()) return tab.back();
    const double fr = pos - double(k);
    return fr == 0.0 ? tab[k] : (1.0 - fr) * tab[k] + fr * tab[k + 1];
}

WaveletPair build_wavelet_pair(int u, const GridSpec& grid, int R)
{
    WaveletPair w;
    w.u = u;
    w.h = daubechies(u);
    w.R = R;
    const int len = int(w.h.size());
    for (int k = 0; k < len; ++k) w.g.push_back(((k & 1) ? -1.0 : 1.0) * w.h[std::size_t(len - 1 - k)]);
    const int Ls = len - 1;
    const double r2 = std::sqrt(2.0);

    // integer-node values: eigenvector of the refinement matrix for eigenvalue 1, normalized to sum 1
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Ls + 2, Ls + 1);
    for (int k = 0; k <= Ls; ++k) {
        A(k, k) -= 1.0;
        for (int l = 0; l < len; ++l)
            if (2 * k - l >= 0 && 2 * k - l <= Ls) A(k, 2 * k - l) += r2 * w.h[std::size_t(l)];
    }
    A.row(Ls + 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Ls + 2);
    rhs[Ls + 1] = 1.0;
    const Eigen::VectorXd p = A.colPivHouseholderQr().solve(rhs);
    w.eigen_residual = (A * p - rhs).cwiseAbs().maxCoeff();
    require(w.eigen_residual < 1e-8, ErrorKind::NoConvergence, "refinement eigenvector did not converge");

    // exact dyadic refinement: level r values from level r-1
    std::vector<double> vals(p.data(), p.data() + p.size());
    for (int r = 1; r <= R; ++r) {
        const long n = long(Ls) * (1L << r) + 1;
        std::vector<double> next(std::size_t(n), 0.0);
        const long half = 1L << (r - 1);
        for (long idx = 0; idx < n; ++idx) {
            double s = 0.0;
            for (int l = 0; l < len; ++l) {
                const long j = idx - l * half;
                if (j >= 0 && j < long(vals.size())) s += w.h[std::size_t(l)] * vals[std::size_t(j)];
            }
            next[std::size_t(idx)] = r2 * s;
        }
        vals = std::move(next);
    }
    w.phi = vals;
    w.psi.assign(vals.size(), 0.0);
    const long full = 1L << R;
    for (long idx = 0; idx < long(vals.size()); ++idx) {
        double s = 0.0;
        for (int l = 0; l < len; ++l) {
            const long j = 2 * idx - l * full;
            if (j >= 0 && j < long(vals.size())) s += w.g[std::size_t(l)] * vals[std::size_t(j)];
        }
        w.psi[std::size_t(idx)] = r2 * s;
    }
    auto tensor = [&](bool mother) {
        return RealField::sample(grid, [&](const Point& x) {
            double v = w.eval(x[0], mother);
            if (grid.n == 2) v *= w.eval(x[1], mother);
            return v;
        });
    };
    w.psi_F = tensor(false);
    w.psi_M = tensor(true);
    return w;
}

cplx phi_hat(const WaveletPair& w, double xi)
{
    cplx acc = 1.0;
    for (int l = 1; l <= 64; ++l) acc *= m_filter(w.h, std::ldexp(xi, -l));
    return acc / std::sqrt(2.0 * pi);
}

cplx psi_hat(const WaveletPair& w, double xi) { return m_filter(w.g, 0.5 * xi) * phi_hat(w, 0.5 * xi); }

std::vector<MultiIndex> genders(int n, int j)
{
    std::vector<MultiIndex> out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < (n == 2 ? 2 : 1); ++b) {
            if (j >= 1 && a == 0 && b == 0) continue;
            out.push_back(MultiIndex{{a, b}, n});
        }
    std::sort(out.begin(), out.end(), graded_less);
    return out;
}

namespace {

std::pair<long, long> period_window(const GridSpec& g, int j)
{
    const double half = std::ldexp(0.5 * g.L, j);
    return {long(std::ceil(-half)), long(std::ceil(half)) - 1};
}

struct AxisTable {
    long start = 0;
    std::vector<double> v;
};

std::vector<AxisTable> axis_tables(const WaveletPair& w, const GridSpec& g, int j, bool mother)
{
    const auto [m0, m1] = period_window(g, j);
    std::vector<AxisTable> out;
    for (long m = m0; m <= m1; ++m) {
        AxisTable t;
        const double xlo = std::ldexp(double(m), -j), xhi = std::ldexp(double(m) + w.support(), -j);
        const long i0 = long(std::ceil((xlo + 0.5 * g.L) / g.h())), i1 = long(std::floor((xhi + 0.5 * g.L) / g.h()));
        t.start = i0;
        for (long i = i0; i <= i1; ++i) t.v.push_back(w.eval(std::ldexp(double(i) * g.h() - 0.5 * g.L, j) - double(m), mother));
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

CoefficientTensor wavelet_analyze(const RealField& f, const WaveletPair& w, int j_max)
{
    const GridSpec& g = f.grid();
    const double cells = g.N / g.L;
    require(j_max >= 0 && std::abs(cells - std::round(cells)) < 1e-12 && std::lround(cells) >= (1L << j_max),
            ErrorKind::LevelOutOfRange, "wavelet levels must land on grid nodes");
    CoefficientTensor out(g.n, Indexing::Wavelet);
    out.meta = {{"flavor", "wavelet"}, {"u", w.u}, {"j_max", j_max}};
    if (sup_norm(f) == 0.0) return out;
    const FrequencyField F = dft_forward(f);

    struct Task {
        MultiIndex G;
        int j;
    };
    std::vector<Task> tasks;
    for (int j = 0; j <= j_max; ++j)
        for (const auto& G : genders(g.n, j)) tasks.push_back({G, j});
    std::vector<Slab> slabs(tasks.size());
    const double c = std::pow(2.0 * pi, 0.5 * g.n);
    parallel_for(tasks.size(), [&](std::size_t ti) {
        const Task& t = tasks[ti];
        std::array<Vec<cplx>, 2> ax;
        for (int a = 0; a < g.n; ++a) {
            ax[std::size_t(a)].resize(g.N);
            for (int k = 0; k < g.N; ++k) {
                const double eta = -std::ldexp(g.freq(k), -t.j);
                ax[std::size_t(a)][k] = t.G.c[std::size_t(a)] ? psi_hat(w, eta) : phi_hat(w, eta);
            }
        }
        Vec<cplx> prod(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const auto k = g.index(i);
            cplx s = ax[0][k[0]];
            if (g.n == 2) s *= ax[1][k[1]];
            prod[i] = F.coeff[i] * s;
        }
        const ComplexField v = dft_inverse({g, prod});
        const long stride = std::lround(cells) >> t.j;
        const auto [m0, m1] = period_window(g, t.j);
        const long count = m1 - m0 + 1;
        auto idx = [&](long m) { return wrap(m * stride + g.N / 2, g.N); };
        Slab s;
        s.beta = t.G;
        s.j = t.j;
        if (g.n == 1) {
            s.lo = {m0, 0};
            s.extent = {count, 1};
            s.v.resize(count);
            for (long a = 0; a < count; ++a) s.v[a] = drop_tiny(c * v[idx(m0 + a)]);
        } else {
            s.lo = {m0, m0};
            s.extent = {count, count};
            s.v.resize(count * count);
            for (long a = 0; a < count; ++a)
                for (long b = 0; b < count; ++b)
                    s.v[a * count + b] = drop_tiny(c * v[g.flat(int(idx(m0 + a)), int(idx(m0 + b)))]);
        }
        slabs[ti] = std::move(s);
    });
    for (auto& s : slabs) out.slab(s.beta, s.j, s.lo, s.extent).v = std::move(s.v);
    project_real(out);
    return out;
}

ComplexField wavelet_synthesize(const CoefficientTensor& lambda, const WaveletPair& w)
{
    require(lambda.indexing() == Indexing::Wavelet, ErrorKind::FlavorMismatch, "wavelet synthesis needs wavelet indexing");
    const GridSpec& g = w.psi_F.grid();
    require(lambda.n() == g.n, ErrorKind::GridMismatch, "tensor dimension differs from the wavelet grid");
    const long N = g.N;
    ComplexField out(g);
    const auto& slabs = lambda.slabs();
    std::vector<Vec<cplx>> pieces(slabs.size());
    parallel_for(slabs.size(), [&](std::size_t si) {
        const Slab& s = slabs[si];
        const auto [m0, m1] = period_window(g, s.j);
        const auto t0 = axis_tables(w, g, s.j, s.beta.c[0] != 0);
        auto at = [&](const std::vector<AxisTable>& t, long m) -> const AxisTable& {
            require(m >= m0 && m <= m1, ErrorKind::IndexOutOfRange, "translate outside the level window");
            return t[std::size_t(m - m0)];
        };
        Vec<cplx> acc = Vec<cplx>::Zero(g.size());
        if (g.n == 1) {
            for (long a = 0; a < s.extent[0]; ++a) {
                if (s.v[a] == cplx(0.0)) continue;
                const AxisTable& t = at(t0, s.lo[0] + a);
                for (std::size_t k = 0; k < t.v.size(); ++k) acc[wrap(t.start + long(k), N)] += s.v[a] * t.v[k];
            }
        } else {
            const auto t1 = axis_tables(w, g, s.j, s.beta.c[1] != 0);
            Vec<cplx> row(N);
            for (long a = 0; a < s.extent[0]; ++a) {
                row.setZero();
                for (long b = 0; b < s.extent[1]; ++b) {
                    const cplx v = s.v[a * s.extent[1] + b];
                    if (v == cplx(0.0)) continue;
                    const AxisTable& t = at(t1, s.lo[1] + b);
                    for (std::size_t k = 0; k < t.v.size(); ++k) row[wrap(t.start + long(k), N)] += v * t.v[k];
                }
                const AxisTable& t = at(t0, s.lo[0] + a);
                for (std::size_t k = 0; k < t.v.size(); ++k) acc.segment(wrap(t.start + long(k), N) * N, N) += t.v[k] * row;
            }
        }
        pieces[si] = std::move(acc);
    });
    for (const auto& p : pieces) out.values() += p;
    return out;
}

WaveletInvariants wavelet_invariants(const WaveletPair& w)
{
    WaveletInvariants r;
    const double dx = std::ldexp(1.0, -w.R);
    for (int v = 0; v < w.u; ++v) {
        double s = 0.0;
        for (std::size_t k = 0; k < w.psi.size(); ++k) s += w.psi[k] * std::pow(double(k) * dx, v);
        r.moments.push_back(s * dx);
    }
    double nf = 0.0, nm = 0.0, ov = 0.0;
    const std::size_t shift = std::size_t(1) << w.R;
    for (std::size_t k = 0; k < w.phi.size(); ++k) {
        nf += w.phi[k] * w.phi[k];
        nm += w.psi[k] * w.psi[k];
        if (k >= shift) ov += w.phi[k] * w.phi[k - shift];
    }
    r.norm_F = std::sqrt(nf * dx);
    r.norm_M = std::sqrt(nm * dx);
    r.shift_overlap = ov * dx;
    // measured extent of the sampled scaling function on the working grid
    const GridSpec& g = w.psi_F.grid();
    long first = -1, last = -1;
    for (int i = 0; i < g.N; ++i) {
        const double v = g.n == 1 ? w.psi_F[i] : w.psi_F[g.flat(i, g.N / 2 + 1)];
        if (std::abs(v) > 1e-14) {
            if (first < 0) first = i;
            last = i;
        }
    }
    r.support_length = first < 0 ? 0.0 : double(last - first + 2) * g.h();
    return r;
}

GramReport wavelet_gram(const WaveletPair& w, int n, int patch)
{
    // 1-D functions 2^{j/2} w_G(2^j x - m), j in {0,1}, both genders
    struct Fn {
        int j;
        int G;
        long m;
    };
    std::vector<Fn> fns;
    for (int j = 0; j <= 1; ++j)
        for (int G = 0; G <= 1; ++G)
            for (long m = -patch; m <= patch; ++m) fns.push_back({j, G, m});
    const double dx = std::ldexp(1.0, -(w.R - 1));
    const long lo = long(std::floor(-patch / dx)), hi = long(std::ceil((patch + w.support() + 1.0) / dx));
    Eigen::MatrixXd S(long(fns.size()), hi - lo + 1);
    for (std::size_t a = 0; a < fns.size(); ++a)
        for (long i = lo; i <= hi; ++i) {
            const double x = double(i) * dx;
            const Fn& f = fns[a];
            S(long(a), i - lo) = std::sqrt(double(1 << f.j)) * w.eval(std::ldexp(x, f.j) - double(f.m), f.G != 0);
        }
    const Eigen::MatrixXd G1 = S * S.transpose() * dx;
    auto slot = [&](int j, int G, long m) { return long((j * 2 + G) * (2 * patch + 1) + (m + patch)); };

    struct Basis {
        int j;
        MultiIndex G;
        Lattice m;
    };
    std::vector<Basis> basis;
    for (int j = 0; j <= 1; ++j)
        for (const auto& G : genders(n, j))
            for (long a = -patch; a <= patch; ++a)
                for (long b = -patch; b <= (n == 2 ? patch : -patch); ++b) basis.push_back({j, G, {a, n == 2 ? b : 0}});
    GramReport rep;
    rep.size = basis.size();
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b) {
            double v = 1.0;
            for (int l = 0; l < n; ++l)
                v *= G1(slot(basis[a].j, basis[a].G.c[std::size_t(l)], basis[a].m[std::size_t(l)]),
                        slot(basis[b].j, basis[b].G.c[std::size_t(l)], basis[b].m[std::size_t(l)]));
            if (a == b)
                rep.max_diag_defect = std::max(rep.max_diag_defect, std::abs(v - 1.0));
            else
                rep.max_offdiag = std::max(rep.max_offdiag, std::abs(v));
        }
    return rep;
}

bool wavelet_order_insufficient(int u, const SpaceSpec& spec, int n)
{
    return !(u > std::max(spec.s, spec.sigma_p(n) - spec.s));
}

} // namespace qf
