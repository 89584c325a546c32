#include "qf/frame_transform.hpp"

#include <algorithm>
#include <cmath>

#include "qf/parallel.hpp"

namespace qf {

namespace {

struct Task {
    MultiIndex beta;
    int j;
};

std::vector<Task> tasks_for(const QuarkSystem& sys, const TruncationConfig& cfg)
{
    require(cfg.beta_max <= sys.beta_max(), ErrorKind::IndexOutOfRange, "beta_max exceeds the built dual table");
    require(cfg.j_max <= sys.j_max(), ErrorKind::LevelOutOfRange, "j_max exceeds the system's level range");
    require(cfg.j_min >= 0 && cfg.j_min <= cfg.j_max, ErrorKind::LevelOutOfRange, "empty level range");
    std::vector<Task> out;
    for (const MultiIndex& b : sys.betas())
        if (b.order() <= cfg.beta_max)
            for (int j = cfg.j_min; j <= cfg.j_max; ++j) out.push_back({b, j});
    return out;
}

long lattice_stride(const GridSpec& g, int j)
{
    // grid samples per 2^-j; exact because the system checks N/L is a dyadic integer >= 2^j_max
    return std::lround(g.N / g.L) >> j;
}

long wrap(long i, long N) { return ((i % N) + N) % N; }

Slab negative_slab(const ComplexField& f, const QuarkSystem& sys, const MultiIndex& beta, int j)
{
    const GridSpec& g = sys.grid();
    const long N = g.N;
    const auto q0 = sys.axis_quarks(beta.c[0], j);
    const double scale = std::ldexp(std::pow(g.h(), g.n), j * g.n);
    Slab s;
    s.beta = beta;
    s.j = j;
    const auto [m0, m1] = sys.m_window(j);
    const long count = m1 - m0 + 1;
    if (g.n == 1) {
        s.lo = {m0, 0};
        s.extent = {count, 1};
        s.v = Vec<cplx>::Zero(count);
        for (long a = 0; a < count; ++a) {
            const AxisQuark& q = q0[std::size_t(a)];
            cplx acc = 0.0;
            for (std::size_t t = 0; t < q.v.size(); ++t) acc += f[wrap(q.start + long(t), N)] * q.v[t];
            s.v[a] = drop_tiny(acc * scale);
        }
        return s;
    }
    const auto q1 = sys.axis_quarks(beta.c[1], j);
    s.lo = {m0, m0};
    s.extent = {count, count};
    s.v = Vec<cplx>::Zero(count * count);
    // T(i0, m1) = sum_i1 f(i0, i1) k1(i1)
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> T(N, count);
    for (long i0 = 0; i0 < N; ++i0)
        for (long b = 0; b < count; ++b) {
            const AxisQuark& q = q1[std::size_t(b)];
            cplx acc = 0.0;
            for (std::size_t t = 0; t < q.v.size(); ++t) acc += f[i0 * N + wrap(q.start + long(t), N)] * q.v[t];
            T(i0, b) = acc;
        }
    for (long a = 0; a < count; ++a) {
        const AxisQuark& q = q0[std::size_t(a)];
        for (long b = 0; b < count; ++b) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < q.v.size(); ++t) acc += T(wrap(q.start + long(t), N), b) * q.v[t];
            s.v[a * count + b] = drop_tiny(acc * scale);
        }
    }
    return s;
}

Vec<cplx> positive_piece(const Slab& s, const QuarkSystem& sys)
{
    const GridSpec& g = sys.grid();
    const long N = g.N;
    Vec<cplx> out = Vec<cplx>::Zero(g.size());
    const auto [m0, m1] = sys.m_window(s.j);
    const auto q0 = sys.axis_quarks(s.beta.c[0], s.j);
    auto quark_at = [&](const std::vector<AxisQuark>& q, long m) -> const AxisQuark& {
        require(m >= m0 && m <= m1, ErrorKind::IndexOutOfRange, "translate outside the level window");
        return q[std::size_t(m - m0)];
    };
    if (g.n == 1) {
        for (long a = 0; a < s.extent[0]; ++a) {
            const cplx v = s.v[a];
            if (v == cplx(0.0)) continue;
            const AxisQuark& q = quark_at(q0, s.lo[0] + a);
            for (std::size_t t = 0; t < q.v.size(); ++t) out[wrap(q.start + long(t), N)] += v * q.v[t];
        }
        return out;
    }
    const auto q1 = sys.axis_quarks(s.beta.c[1], s.j);
    Vec<cplx> row(N);
    for (long a = 0; a < s.extent[0]; ++a) {
        row.setZero();
        bool any = false;
        for (long b = 0; b < s.extent[1]; ++b) {
            const cplx v = s.v[a * s.extent[1] + b];
            if (v == cplx(0.0)) continue;
            any = true;
            const AxisQuark& q = quark_at(q1, s.lo[1] + b);
            for (std::size_t t = 0; t < q.v.size(); ++t) row[wrap(q.start + long(t), N)] += v * q.v[t];
        }
        if (!any) continue;
        const AxisQuark& q = quark_at(q0, s.lo[0] + a);
        for (std::size_t t = 0; t < q.v.size(); ++t) out.segment(wrap(q.start + long(t), N) * N, N) += q.v[t] * row;
    }
    return out;
}

Vec<cplx> negative_piece(const Slab& s, const QuarkSystem& sys, int j_min)
{
    const GridSpec& g = sys.grid();
    const long stride = lattice_stride(g, s.j);
    const double inv = 1.0 / std::pow(g.h(), g.n);
    ComplexField comb(g);
    for (Eigen::Index o = 0; o < s.v.size(); ++o) {
        if (s.v[o] == cplx(0.0)) continue;
        const Lattice m = s.lattice(o);
        const long i0 = wrap(m[0] * stride + g.N / 2, g.N);
        const long i1 = g.n == 2 ? wrap(m[1] * stride + g.N / 2, g.N) : 0;
        comb[g.flat(int(i0), int(i1))] += s.v[o] * inv;
    }
    FrequencyField F = dft_forward(comb);
    F.coeff = F.coeff.cwiseProduct(sys.template_spectrum(s.beta, s.j, s.j == j_min ? Branch::F : Branch::M));
    return dft_inverse(F).values() * std::pow(2.0 * pi, 0.5 * g.n);
}

} // namespace

Slab positive_slab(const FrequencyField& F, const QuarkSystem& sys, const MultiIndex& beta, int j, Branch br)
{
    const GridSpec& g = sys.grid();
    const Vec<cplx> sym = sys.analysis_symbol(beta, j, br);
    const ComplexField v = dft_inverse({g, F.coeff.cwiseProduct(sym)});
    const double c = std::pow(2.0 * pi, 0.5 * g.n);
    const long stride = lattice_stride(g, j);
    const auto [m0, m1] = sys.m_window(j);
    const long count = m1 - m0 + 1;
    Slab s;
    s.beta = beta;
    s.j = j;
    auto idx = [&](long m) { return wrap(m * stride + g.N / 2, g.N); };
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
    return s;
}

CoefficientTensor analyze(const ComplexField& f, const QuarkSystem& sys, const TruncationConfig& cfg)
{
    require(f.grid() == sys.grid(), ErrorKind::GridMismatch, "field and system grids differ");
    const auto tasks = tasks_for(sys, cfg);
    CoefficientTensor out(sys.n());
    out.meta = {{"regime", cfg.regime == Regime::Positive ? "positive" : "negative"},
                {"beta_max", cfg.beta_max},
                {"j_min", cfg.j_min},
                {"j_max", cfg.j_max}};
    if (sup_norm(f) == 0.0) return out;
    std::vector<Slab> slabs(tasks.size());
    if (cfg.regime == Regime::Positive) {
        const FrequencyField F = dft_forward(f);
        parallel_for(tasks.size(), [&](std::size_t i) {
            const Task& t = tasks[i];
            slabs[i] = positive_slab(F, sys, t.beta, t.j, t.j == cfg.j_min ? Branch::F : Branch::M);
        });
    } else {
        require(cfg.j_min == 0, ErrorKind::RegimeMismatch, "negative regime starts at level 0");
        parallel_for(tasks.size(), [&](std::size_t i) { slabs[i] = negative_slab(f, sys, tasks[i].beta, tasks[i].j); });
    }
    for (auto& s : slabs) {
        Slab& d = out.slab(s.beta, s.j, s.lo, s.extent);
        d.v = std::move(s.v);
    }
    return out;
}

CoefficientTensor analyze(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg)
{
    CoefficientTensor out = analyze(to_complex(f), sys, cfg);
    project_real(out);
    return out;
}

ComplexField synthesize(const CoefficientTensor& lambda, const QuarkSystem& sys, const TruncationConfig& cfg)
{
    require(lambda.n() == sys.n(), ErrorKind::GridMismatch, "tensor dimension differs from the system");
    require(lambda.indexing() == Indexing::Quark, ErrorKind::FlavorMismatch, "quark synthesis needs quark indexing");
    const auto& slabs = lambda.slabs();
    for (const auto& s : slabs) {
        require(s.beta.order() <= cfg.beta_max && s.beta.order() <= sys.beta_max(), ErrorKind::IndexOutOfRange,
                "coefficient beta beyond the truncation");
        require(s.j >= cfg.j_min && s.j <= cfg.j_max && s.j <= sys.j_max(), ErrorKind::IndexOutOfRange,
                "coefficient level beyond the truncation");
    }
    ComplexField out(sys.grid());
    // bounded batches keep memory flat; summation follows slab order regardless of the schedule
    const std::size_t batch = std::max<std::size_t>(1, worker_count());
    std::vector<Vec<cplx>> pieces;
    for (std::size_t b0 = 0; b0 < slabs.size(); b0 += batch) {
        const std::size_t cnt = std::min(batch, slabs.size() - b0);
        pieces.assign(cnt, Vec<cplx>());
        parallel_for(cnt, [&](std::size_t i) {
            const Slab& s = slabs[b0 + i];
            pieces[i] = cfg.regime == Regime::Positive ? positive_piece(s, sys) : negative_piece(s, sys, cfg.j_min);
        });
        for (const auto& p : pieces) out.values() += p;
    }
    return out;
}

double round_trip_residual(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg, ResidualNorm norm)
{
    const double base = norm == ResidualNorm::L2 ? lp_norm(f, 2.0) : sup_norm(f);
    if (base == 0.0) return 0.0;
    const ComplexField r = synthesize(analyze(f, sys, cfg), sys, cfg);
    const ComplexField d = r - to_complex(f);
    return (norm == ResidualNorm::L2 ? lp_norm(d, 2.0) : sup_norm(d)) / base;
}

Regime regime_for(const SpaceSpec& spec, int n)
{
    spec.validate();
    if (spec.s < 0.0) return Regime::Negative;
    if (spec.family == Family::F) {
        require(spec.s > spec.sigma_pq(n), ErrorKind::HypothesisViolated, "hypothesis s > σ^n_{p,q} violated");
    } else {
        require(spec.s > spec.sigma_p(n), ErrorKind::HypothesisViolated, "hypothesis s > σ^n_p violated");
    }
    // s = 0 sits outside both proven ranges
    require(spec.s > 0.0, ErrorKind::HypothesisViolated, "hypothesis s > 0 violated");
    return Regime::Positive;
}

SequenceSpec sequence_spec_for(const SpaceSpec& spec, const GridSpec& g)
{
    SequenceSpec q;
    q.space = spec;
    q.flavor = spec.delta != 0.0 ? Flavor::WeightedQuark : Flavor::Quark;
    q.grid = g;
    return q;
}

RatioReport summarize_ratios(std::vector<RatioRow> rows, const SpaceSpec& spec, Regime regime)
{
    RatioReport rep;
    rep.spec = spec;
    rep.regime = regime;
    rep.rows = std::move(rows);
    rep.min = std::numeric_limits<double>::infinity();
    rep.max = 0.0;
    for (const auto& r : rep.rows) {
        if (!(r.reference > 0.0)) continue;
        rep.min = std::min(rep.min, r.ratio);
        rep.max = std::max(rep.max, r.ratio);
    }
    if (rep.max == 0.0) rep.min = 0.0;
    rep.spread = rep.min > 0.0 ? rep.max / rep.min : 0.0;
    return rep;
}

RatioReport frame_ratio_report(const std::vector<RealField>& corpus, const SpaceSpec& spec, const QuarkSystem& sys,
                               TruncationConfig cfg, const ResolutionOfUnity& res)
{
    cfg.regime = regime_for(spec, sys.n());
    cfg.j_min = 0;
    const SequenceSpec seq = sequence_spec_for(spec, sys.grid());
    std::vector<RatioRow> rows;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        RatioRow r;
        r.id = i;
        r.sequence = sequence_norm(analyze(corpus[i], sys, cfg), seq);
        r.reference = reference_norm(corpus[i], spec, res);
        r.ratio = r.reference > 0.0 ? r.sequence / r.reference : 0.0;
        rows.push_back(r);
    }
    return summarize_ratios(std::move(rows), spec, cfg.regime);
}

namespace {

template <class S>
cplx local_mean_impl(const SampledField<S>& f, const QuarkTemplate& k, double t, const Point& x)
{
    const GridSpec& g = f.grid();
    require(t >= g.h() * (1.0 - 1e-12), ErrorKind::ScaleTooFine, "local mean scale below the grid spacing");
    const double lo = k.profile.support_lo(), hi = k.profile.support_hi();
    const long N = g.N;
    std::array<long, 2> i0{0, 0}, i1{0, 0};
    for (int a = 0; a < g.n; ++a) {
        i0[std::size_t(a)] = long(std::ceil((x[std::size_t(a)] + t * lo + 0.5 * g.L) / g.h()));
        i1[std::size_t(a)] = long(std::floor((x[std::size_t(a)] + t * hi + 0.5 * g.L) / g.h()));
    }
    auto axis_val = [&](long i, int a) { return k.axis((double(i) * g.h() - 0.5 * g.L - x[std::size_t(a)]) / t, 0); };
    cplx acc = 0.0;
    if (g.n == 1) {
        for (long i = i0[0]; i <= i1[0]; ++i) acc += cplx(f[wrap(i, N)]) * axis_val(i, 0);
    } else {
        for (long a = i0[0]; a <= i1[0]; ++a) {
            const double ka = axis_val(a, 0);
            if (ka == 0.0) continue;
            cplx row = 0.0;
            for (long b = i0[1]; b <= i1[1]; ++b) row += cplx(f[wrap(a, N) * N + wrap(b, N)]) * axis_val(b, 1);
            acc += ka * row;
        }
    }
    return acc * std::pow(g.h() / t, g.n);
}

} // namespace

cplx local_mean_continuous(const ComplexField& f, const QuarkTemplate& k, double t, const Point& x)
{
    return local_mean_impl(f, k, t, x);
}

cplx local_mean_continuous(const RealField& f, const QuarkTemplate& k, double t, const Point& x)
{
    return local_mean_impl(f, k, t, x);
}

double single_beta_norm(const RealField& f, const QuarkSystem& sys, const SpaceSpec& spec, int j_max)
{
    require(spec.s < 0.0, ErrorKind::HypothesisViolated, "hypothesis s < 0 violated");
    require(sys.config().small_slope, ErrorKind::HypothesisViolated, "single-beta norm needs the small-slope bump");
    const TruncationConfig cfg{0, j_max, Regime::Negative, 0};
    return sequence_norm(analyze(f, sys, cfg), sequence_spec_for(spec, sys.grid()));
}

LiftReport derivative_lift_norm(const RealField& f, const SpaceSpec& spec, int N, const QuarkSystem& sys,
                                const ResolutionOfUnity& res, int j_max)
{
    const bool ok = N == 0 ? spec.s < 0.0 : (spec.s - N < 0.0 && spec.s > 0.0 && spec.s <= N);
    require(ok, ErrorKind::HypothesisViolated, "hypothesis s - N < 0 < s <= N violated");
    SpaceSpec shifted = spec;
    shifted.s = spec.s - N;
    const TruncationConfig cfg{sys.beta_max(), j_max, Regime::Negative, 0};
    const SequenceSpec seq = sequence_spec_for(shifted, sys.grid());
    LiftReport rep;
    rep.alpha_argmax = MultiIndex{{0, 0}, sys.n()};
    for (const MultiIndex& a : enumerate_multi_indices(sys.n(), N)) {
        const RealField d = spectral_derivative(f, a);
        const double v = sequence_norm(analyze(d, sys, cfg), seq);
        if (v > rep.sequence) {
            rep.sequence = v;
            rep.alpha_argmax = a;
        }
        rep.reference = std::max(rep.reference, reference_norm(d, shifted, res));
    }
    return rep;
}

} // namespace qf
