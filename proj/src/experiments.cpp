#include "qf/experiments.hpp"

#include <cmath>

namespace qf {

PositivityReport positivity_experiment(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg_in,
                                       const SpaceSpec& spec, const ResolutionOfUnity& res)
{
    require(regime_for(spec, sys.n()) == Regime::Positive, ErrorKind::HypothesisViolated,
            "positivity needs the positive-smoothness regime");
    TruncationConfig cfg = cfg_in;
    cfg.regime = Regime::Positive;
    const CoefficientTensor lambda = analyze(f, sys, cfg);
    const SplitTensors sp = positivity_split(lambda);
    PositivityReport r;
    r.f1 = require_real(synthesize(sp.plus, sys, cfg), 1e-12);
    r.f2 = require_real(synthesize(sp.minus, sys, cfg), 1e-12);
    const ComplexField whole = synthesize(lambda, sys, cfg);
    const RealField diff = r.f1 - r.f2;
    r.min_f1 = r.f1.values().minCoeff();
    r.min_f2 = r.f2.values().minCoeff();
    r.sup_f1 = sup_norm(r.f1);
    r.sup_f2 = sup_norm(r.f2);
    r.residual_sup = sup_norm(RealField(f - diff));
    r.split_identity = sup_norm(ComplexField(to_complex(diff) - whole));
    const double nf = reference_norm(f, spec, res);
    r.norm_sum_ratio = nf > 0.0 ? (reference_norm(r.f1, spec, res) + reference_norm(r.f2, spec, res)) / nf : 0.0;
    const SequenceSpec seq = sequence_spec_for(spec, sys.grid());
    const double nl = sequence_norm(lambda, seq);
    r.seq_plus = sequence_norm(sp.plus, seq);
    r.seq_minus = sequence_norm(sp.minus, seq);
    r.sequence_sum_ratio = nl > 0.0 ? (r.seq_plus + r.seq_minus) / nl : 0.0;
    return r;
}

double multiplication_algebra_probe(const RealField& f1, const RealField& f2, const SpaceSpec& spec,
                                    const ResolutionOfUnity& res)
{
    spec.validate();
    const int n = f1.grid().n;
    require(spec.family == Family::B, ErrorKind::HypothesisViolated, "multiplication probe uses B-spaces");
    require(spec.s > n / spec.p, ErrorKind::HypothesisViolated, "hypothesis s > n/p violated");
    RealField prod = f1;
    prod.values() = f1.values().cwiseProduct(f2.values());
    const double d = reference_norm(f1, spec, res) * reference_norm(f2, spec, res);
    return d > 0.0 ? reference_norm(prod, spec, res) / d : 0.0;
}

double pointwise_multiplier_probe(const RealField& g, const RealField& f, const SpaceSpec& spec, double rho,
                                  const ResolutionOfUnity& res)
{
    spec.validate();
    const int n = f.grid().n;
    require(spec.s < 0.0, ErrorKind::HypothesisViolated, "hypothesis s < 0 violated");
    const double need = (spec.family == Family::F ? spec.sigma_pq(n) : spec.sigma_p(n)) - spec.s;
    require(rho > need, ErrorKind::HypothesisViolated,
            spec.family == Family::F ? "hypothesis rho > σ^n_{p,q} - s violated" : "hypothesis rho > σ^n_p - s violated");
    const SpaceSpec holder{Family::B, rho, std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity(), 0.0, 0.0};
    RealField prod = g;
    prod.values() = g.values().cwiseProduct(f.values());
    const double d = reference_norm(g, holder, res) * reference_norm(f, spec, res);
    return d > 0.0 ? reference_norm(prod, spec, res) / d : 0.0;
}

double homogeneity_base_bump(const Point& x, int n)
{
    double r2 = 4.0 * x[0] * x[0];
    if (n == 2) r2 += 4.0 * x[1] * x[1];
    return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

HomogeneityReport homogeneity_probe(const std::function<double(const Point&)>& base, double base_radius,
                                    const SpaceSpec& spec, const std::vector<double>& lambdas, const GridSpec& g)
{
    spec.validate();
    require(spec.family == Family::F || spec.p == spec.q, ErrorKind::HypothesisViolated,
            "homogeneity needs F-spaces or p = q");
    require(spec.s > spec.sigma_p(g.n), ErrorKind::HypothesisViolated, "hypothesis s > σ^n_p violated");
    require(lambdas.size() >= 2, ErrorKind::SpecInvalid, "need at least two scales");
    const ResolutionOfUnity res = build_resolution(g);
    const RealField f0 = RealField::sample(g, base);
    const double n0 = reference_norm(f0, spec, res);
    HomogeneityReport rep;
    rep.lambdas = lambdas;
    rep.expected = spec.s - (std::isinf(spec.p) ? 0.0 : g.n / spec.p);
    for (double lam : lambdas) {
        require(lam > 0.0 && lam <= 1.0, ErrorKind::SpecInvalid, "scales must lie in (0, 1]");
        require(base_radius * lam <= lam && base_radius * lam > 2.0 * g.h(), ErrorKind::SupportViolation,
                "shrunk support leaves the unit ball or falls below the grid");
        // f = base(./lam) is supported in |x| <= lam and f(lam .) = base
        const RealField f = RealField::sample(g, [&](const Point& x) { return base({x[0] / lam, x[1] / lam}); });
        rep.ratios.push_back(n0 / reference_norm(f, spec, res));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = double(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double x = std::log(lambdas[i]), y = std::log(rep.ratios[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return rep;
}

CoefficientTensor delta_coefficients(const Point& x0, const QuarkSystem& sys, int beta_max, int j_max)
{
    const int n = sys.n();
    const QuarkTemplate& k = sys.quark();
    const double lo = k.profile.support_lo(), hi = k.profile.support_hi();
    CoefficientTensor out(n);
    for (const MultiIndex& beta : sys.betas()) {
        if (beta.order() > beta_max) continue;
        for (int j = 0; j <= j_max; ++j) {
            const double scale = std::ldexp(1.0, j * n);
            std::array<long, 2> m0{0, 0}, m1{0, 0};
            for (int a = 0; a < n; ++a) {
                const double y = std::ldexp(x0[std::size_t(a)], j);
                m0[std::size_t(a)] = long(std::ceil(y - hi));
                m1[std::size_t(a)] = long(std::floor(y - lo));
            }
            for (long a = m0[0]; a <= m1[0]; ++a)
                for (long b = m0[1]; b <= m1[1]; ++b) {
                    const Point y{std::ldexp(x0[0], j) - double(a), n == 2 ? std::ldexp(x0[1], j) - double(b) : 0.0};
                    const double v = k.eval(y, beta);
                    if (v != 0.0) out.set(beta, j, {a, b}, scale * v);
                }
        }
    }
    return out;
}

std::vector<DeltaProbe> default_delta_probes(const Point& x0, int n)
{
    auto gauss = [x0, n](double w, Point shift) {
        return [=](const Point& x) {
            double r2 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double d = x[std::size_t(k)] - x0[std::size_t(k)] - shift[std::size_t(k)];
                r2 += d * d;
            }
            return std::exp(-r2 / (2.0 * w * w));
        };
    };
    return {
        {"plateau", [x0, n](const Point& x) {
             double v = 1.0;
             for (int k = 0; k < n; ++k) v *= cutoff((x[std::size_t(k)] - x0[std::size_t(k)]) / 2.0, 1.0, 2.0);
             return v;
         }},
        {"gauss_w015", gauss(0.15, {0.0, 0.0})},
        {"gauss_w008_shift", gauss(0.08, {0.05, 0.05})},
        {"gauss_w03_shift", gauss(0.3, {-0.1, 0.1})},
        {"wave", [x0, n](const Point& x) {
             double r2 = 0.0, c = 1.0;
             for (int k = 0; k < n; ++k) {
                 const double d = x[std::size_t(k)] - x0[std::size_t(k)];
                 r2 += d * d;
                 c *= std::cos(10.0 * d + 0.4);
             }
             return c * std::exp(-r2 / 0.18);
         }},
    };
}

DeltaReport delta_expansion_demo(const Point& x0, const QuarkSystem& sys, const std::vector<DeltaProbe>& probes,
                                 int J_first, int J_last)
{
    const GridSpec& g = sys.grid();
    for (int a = 0; a < g.n; ++a)
        require(std::abs(x0[std::size_t(a)]) < 0.25 * g.L, ErrorKind::SupportOverflow, "x0 must sit well inside the box");
    require(J_first >= 0 && J_first <= J_last && J_last <= sys.j_max(), ErrorKind::LevelOutOfRange, "bad level range");
    DeltaReport rep;
    rep.x0 = x0;
    const CoefficientTensor all = delta_coefficients(x0, sys, sys.beta_max(), J_last);
    for (const auto& s : all.slabs()) {
        std::size_t c = 0;
        for (Eigen::Index o = 0; o < s.v.size(); ++o) c += s.v[o] != cplx(0.0);
        rep.max_terms_per_level = std::max(rep.max_terms_per_level, c);
    }
    std::vector<RealField> pf;
    for (const auto& p : probes) {
        rep.probes.push_back(p.name);
        pf.push_back(RealField::sample(g, p.fn));
    }
    rep.errors.assign(probes.size(), {});
    // partial sums grow level by level; the Phi synthesis is linear so each level is added once
    ComplexField acc(g);
    for (int j = 0; j <= J_last; ++j) {
        CoefficientTensor level(g.n);
        for (const auto& s : all.slabs())
            if (s.j == j) level.slab(s.beta, s.j, s.lo, s.extent).v = s.v;
        acc += synthesize(level, sys, TruncationConfig{sys.beta_max(), J_last, Regime::Negative, 0});
        if (j < J_first) continue;
        rep.levels.push_back(j);
        for (std::size_t p = 0; p < probes.size(); ++p)
            rep.errors[p].push_back(std::abs(pairing(acc, to_complex(pf[p])) - probes[p].fn(x0)));
    }
    // trend: least-squares slope of log error over J negative and the last level below the first
    rep.monotone = true;
    rep.strictly_monotone = true;
    for (const auto& e : rep.errors) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = double(e.size());
        for (std::size_t i = 0; i < e.size(); ++i) {
            const double x = rep.levels[i], y = std::log(std::max(e[i], 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            if (i > 0) rep.strictly_monotone = rep.strictly_monotone && e[i] < e[i - 1];
        }
        const double slope = e.size() > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
        rep.slopes.push_back(slope);
        rep.monotone = rep.monotone && slope < 0.0 && e.back() < e.front();
        rep.final_max = std::max(rep.final_max, e.back());
    }
    return rep;
}

} // namespace qf
