#include "qf/sequence_norms.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace qf {

bool Slab::contains(const Lattice& m) const
{
    for (int a = 0; a < 2; ++a)
        if (m[std::size_t(a)] < lo[std::size_t(a)] || m[std::size_t(a)] >= lo[std::size_t(a)] + extent[std::size_t(a)])
            return false;
    return true;
}

Eigen::Index Slab::offset(const Lattice& m) const
{
    return Eigen::Index(m[0] - lo[0]) * extent[1] + (m[1] - lo[1]);
}

Lattice Slab::lattice(Eigen::Index off) const
{
    return {lo[0] + long(off / extent[1]), lo[1] + long(off % extent[1])};
}

namespace {

bool key_less(const MultiIndex& a, int ja, const MultiIndex& b, int jb)
{
    if (!(a == b)) return graded_less(a, b);
    return ja < jb;
}

Lattice normalized(const Lattice& m, int n) { return n == 1 ? Lattice{m[0], 0} : m; }

} // namespace

std::vector<Slab>::iterator CoefficientTensor::locate(const MultiIndex& beta, int j)
{
    return std::lower_bound(slabs_.begin(), slabs_.end(), std::make_pair(beta, j),
                            [](const Slab& s, const std::pair<MultiIndex, int>& k) {
                                return key_less(s.beta, s.j, k.first, k.second);
                            });
}

Slab& CoefficientTensor::slab(const MultiIndex& beta, int j, const Lattice& lo_in, const Lattice& ext_in)
{
    Lattice lo = normalized(lo_in, n_), ext = ext_in;
    if (n_ == 1) ext[1] = 1;
    auto it = locate(beta, j);
    if (it != slabs_.end() && it->beta == beta && it->j == j) {
        Slab& s = *it;
        const Lattice hi_req{lo[0] + ext[0], lo[1] + ext[1]};
        const Lattice hi_old{s.lo[0] + s.extent[0], s.lo[1] + s.extent[1]};
        if (lo[0] >= s.lo[0] && lo[1] >= s.lo[1] && hi_req[0] <= hi_old[0] && hi_req[1] <= hi_old[1]) return s;
        Slab g;
        g.beta = beta;
        g.j = j;
        g.lo = {std::min(lo[0], s.lo[0]), std::min(lo[1], s.lo[1])};
        g.extent = {std::max(hi_req[0], hi_old[0]) - g.lo[0], std::max(hi_req[1], hi_old[1]) - g.lo[1]};
        g.v = Vec<cplx>::Zero(g.extent[0] * g.extent[1]);
        for (Eigen::Index o = 0; o < s.v.size(); ++o)
            if (s.v[o] != cplx(0.0)) g.v[g.offset(s.lattice(o))] = s.v[o];
        s = std::move(g);
        return s;
    }
    Slab s;
    s.beta = beta;
    s.j = j;
    s.lo = lo;
    s.extent = ext;
    s.v = Vec<cplx>::Zero(ext[0] * ext[1]);
    return *slabs_.insert(it, std::move(s));
}

const Slab* CoefficientTensor::find(const MultiIndex& beta, int j) const
{
    auto it = std::lower_bound(slabs_.begin(), slabs_.end(), std::make_pair(beta, j),
                               [](const Slab& s, const std::pair<MultiIndex, int>& k) {
                                   return key_less(s.beta, s.j, k.first, k.second);
                               });
    if (it != slabs_.end() && it->beta == beta && it->j == j) return &*it;
    return nullptr;
}

void CoefficientTensor::set(const MultiIndex& beta, int j, const Lattice& m_in, cplx value)
{
    const Lattice m = normalized(m_in, n_);
    Slab& s = slab(beta, j, m, {1, 1});
    s.v[s.offset(m)] = drop_tiny(value);
}

void CoefficientTensor::add(const MultiIndex& beta, int j, const Lattice& m_in, cplx value)
{
    const Lattice m = normalized(m_in, n_);
    Slab& s = slab(beta, j, m, {1, 1});
    s.v[s.offset(m)] = drop_tiny(s.v[s.offset(m)] + value);
}

cplx CoefficientTensor::get(const MultiIndex& beta, int j, const Lattice& m_in) const
{
    const Lattice m = normalized(m_in, n_);
    const Slab* s = find(beta, j);
    if (!s || !s->contains(m)) return 0.0;
    return s->v[s->offset(m)];
}

std::size_t CoefficientTensor::nonzeros() const
{
    std::size_t c = 0;
    for (const auto& s : slabs_)
        for (Eigen::Index o = 0; o < s.v.size(); ++o) c += s.v[o] != cplx(0.0);
    return c;
}

double CoefficientTensor::max_abs() const
{
    double m = 0.0;
    for (const auto& s : slabs_)
        if (s.v.size()) m = std::max(m, s.v.cwiseAbs().maxCoeff());
    return m;
}

std::vector<MultiIndex> CoefficientTensor::stored_betas() const
{
    std::vector<MultiIndex> out;
    for (const auto& s : slabs_)
        if (out.empty() || !(out.back() == s.beta)) out.push_back(s.beta);
    return out;
}

void CoefficientTensor::for_each(const std::function<void(const MultiIndex&, int, const Lattice&, cplx)>& fn) const
{
    for (const auto& s : slabs_)
        for (Eigen::Index o = 0; o < s.v.size(); ++o)
            if (s.v[o] != cplx(0.0)) fn(s.beta, s.j, s.lattice(o), s.v[o]);
}

CoefficientTensor& CoefficientTensor::operator*=(cplx a)
{
    for (auto& s : slabs_) {
        s.v *= a;
        for (Eigen::Index o = 0; o < s.v.size(); ++o) s.v[o] = drop_tiny(s.v[o]);
    }
    return *this;
}

CoefficientTensor CoefficientTensor::combine(cplx a, const CoefficientTensor& o, cplx b) const
{
    CoefficientTensor r(n_, indexing_);
    r.meta = meta;
    for (const auto& s : slabs_) r.slab(s.beta, s.j, s.lo, s.extent);
    for (const auto& s : o.slabs_) r.slab(s.beta, s.j, s.lo, s.extent);
    for_each([&](const MultiIndex& be, int j, const Lattice& m, cplx v) { r.add(be, j, m, a * v); });
    o.for_each([&](const MultiIndex& be, int j, const Lattice& m, cplx v) { r.add(be, j, m, b * v); });
    return r;
}

namespace {

double lattice_weight(const SequenceSpec& spec, int n, int j, const Lattice& m)
{
    if (spec.flavor != Flavor::WeightedQuark || spec.space.delta == 0.0) return 1.0;
    const double y0 = std::ldexp(double(m[0]), -j), y1 = n == 2 ? std::ldexp(double(m[1]), -j) : 0.0;
    if (std::isinf(spec.space.p) && std::isinf(spec.space.q))
        return std::pow(1.0 + std::hypot(y0, y1), spec.space.delta);
    return std::pow(1.0 + y0 * y0 + y1 * y1, 0.5 * spec.space.delta);
}

bool index_allowed(const SequenceSpec& spec, int j, const Lattice& m)
{
    if (spec.flavor != Flavor::Domain || !spec.domain || !spec.domain->contains) return true;
    return spec.domain->contains(j, m);
}

// norm of one group of slabs: a single beta, or all genders for the wavelet flavor
double group_norm(const std::vector<const Slab*>& group, const SequenceSpec& spec, int n)
{
    const SpaceSpec& sp = spec.space;
    const double p = sp.p, q = sp.q;
    if (sp.family == Family::B) {
        std::map<int, double> per_level;  // sum over slabs of (sum_m |w lambda|^p)^{q/p}, or max for q = inf
        for (const Slab* s : group) {
            double inner = 0.0;
            for (Eigen::Index o = 0; o < s->v.size(); ++o) {
                if (s->v[o] == cplx(0.0)) continue;
                const Lattice m = s->lattice(o);
                if (!index_allowed(spec, s->j, m)) continue;
                const double a = std::abs(s->v[o]) * lattice_weight(spec, n, s->j, m);
                if (std::isinf(p))
                    inner = std::max(inner, a);
                else
                    inner += std::pow(a, p);
            }
            const double lp = std::isinf(p) ? inner : std::pow(inner, 1.0 / p);
            const double scaled = lp * std::pow(2.0, s->j * (sp.s - (std::isinf(p) ? 0.0 : n / p)));
            double& acc = per_level[s->j];
            if (std::isinf(q))
                acc = std::max(acc, scaled);
            else
                acc += std::pow(scaled, q);
        }
        double total = 0.0;
        for (const auto& [j, v] : per_level) total = std::isinf(q) ? std::max(total, v) : total + v;
        return std::isinf(q) ? total : std::pow(total, 1.0 / q);
    }

    // f-flavor: pointwise l_q over (j,m) through the half-open cell indicators, then L_p
    const GridSpec& g = spec.grid;
    Vec<double> acc = Vec<double>::Zero(g.size());
    std::vector<long> cell(std::size_t(g.N));
    for (const Slab* s : group) {
        for (int i = 0; i < g.N; ++i) cell[std::size_t(i)] = long(std::floor(std::ldexp(g.coord(i), s->j)));
        const double scale = std::pow(2.0, s->j * sp.s);
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const auto k = g.index(i);
            const Lattice m{cell[std::size_t(k[0])], n == 2 ? cell[std::size_t(k[1])] : 0};
            if (!s->contains(m)) continue;
            const cplx v = s->v[s->offset(m)];
            if (v == cplx(0.0) || !index_allowed(spec, s->j, m)) continue;
            const double a = std::abs(v) * scale * lattice_weight(spec, n, s->j, m);
            if (std::isinf(q))
                acc[i] = std::max(acc[i], a);
            else
                acc[i] += std::pow(a, q);
        }
    }
    if (!std::isinf(q)) acc = acc.array().pow(1.0 / q).matrix();
    if (spec.flavor == Flavor::Domain && spec.domain && !spec.domain->mask.empty()) {
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (!spec.domain->mask[std::size_t(i)]) acc[i] = 0.0;
    }
    return weighted_lp(acc, g, p);
}

} // namespace

SequenceNormReport sequence_norm_report(const CoefficientTensor& lambda, const SequenceSpec& spec)
{
    spec.space.validate();
    const bool wavelet_data = lambda.indexing() == Indexing::Wavelet;
    require(wavelet_data == (spec.flavor == Flavor::Wavelet), ErrorKind::FlavorMismatch,
            "tensor indexing does not match the sequence flavor");
    const int n = lambda.n();
    if (spec.space.family == Family::F)
        require(spec.grid.n == n, ErrorKind::FlavorMismatch, "f-flavor grid dimension differs from the tensor");

    SequenceNormReport rep;
    rep.beta_argmax = MultiIndex{{0, 0}, n};
    if (spec.flavor == Flavor::Wavelet) {
        std::vector<const Slab*> all;
        for (const auto& s : lambda.slabs()) all.push_back(&s);
        rep.value = group_norm(all, spec, n);
        return rep;
    }
    const auto betas = lambda.stored_betas();
    if (spec.flavor == Flavor::Plain)
        require(betas.size() <= 1 && (betas.empty() || betas.front().order() == 0), ErrorKind::FlavorMismatch,
                "plain flavor takes a single unindexed family");
    double total = 0.0;
    for (const MultiIndex& beta : betas) {
        std::vector<const Slab*> group;
        for (const auto& s : lambda.slabs())
            if (s.beta == beta) group.push_back(&s);
        const double v = std::pow(2.0, spec.space.kappa * beta.order()) * group_norm(group, spec, n);
        rep.per_beta.emplace_back(beta, v);
        if (spec.beta_r) {
            total += std::pow(v, *spec.beta_r);
        } else if (v > total) {
            total = v;
            rep.beta_argmax = beta;
        }
    }
    if (spec.beta_r) {
        total = std::pow(total, 1.0 / *spec.beta_r);
        double best = -1.0;
        for (const auto& [b, v] : rep.per_beta)
            if (v > best) {
                best = v;
                rep.beta_argmax = b;
            }
    }
    rep.value = total;
    return rep;
}

double sequence_norm(const CoefficientTensor& lambda, const SequenceSpec& spec)
{
    return sequence_norm_report(lambda, spec).value;
}

SplitTensors positivity_split(const CoefficientTensor& lambda)
{
    SplitTensors out{CoefficientTensor(lambda.n(), lambda.indexing()), CoefficientTensor(lambda.n(), lambda.indexing())};
    out.plus.meta = out.minus.meta = lambda.meta;
    for (const auto& s : lambda.slabs()) {
        Slab& a = out.plus.slab(s.beta, s.j, s.lo, s.extent);
        Slab& b = out.minus.slab(s.beta, s.j, s.lo, s.extent);
        for (Eigen::Index o = 0; o < s.v.size(); ++o) {
            const cplx v = s.v[o];
            require(std::abs(v.imag()) <= 1e-10 * std::abs(v), ErrorKind::ComplexInput,
                    "positivity split needs real coefficients");
            a.v[o] = std::max(v.real(), 0.0);
            b.v[o] = std::max(-v.real(), 0.0);
        }
    }
    return out;
}

void project_real(CoefficientTensor& lambda, double tol)
{
    const double scale = lambda.max_abs();
    for (auto& s : lambda.slabs())
        for (Eigen::Index o = 0; o < s.v.size(); ++o) {
            require(std::abs(s.v[o].imag()) <= tol * scale, ErrorKind::ComplexInput,
                    "coefficients of a real field carry a significant imaginary part");
            s.v[o] = drop_tiny(s.v[o].real());
        }
}

void write_jsonl(std::ostream& os, const CoefficientTensor& t)
{
    const int n = t.n();
    const bool wav = t.indexing() == Indexing::Wavelet;
    t.for_each([&](const MultiIndex& b, int j, const Lattice& m, cplx v) {
        nlohmann::json rec;
        rec["beta"] = std::vector<int>(b.c.begin(), b.c.begin() + n);
        rec["j"] = j;
        rec["m"] = std::vector<long>(m.begin(), m.begin() + n);
        rec["re"] = v.real();
        rec["im"] = v.imag();
        if (wav) rec["flavor"] = "wavelet";
        os << rec.dump() << '\n';
    });
}

void write_jsonl(const std::string& path, const CoefficientTensor& t)
{
    std::ofstream os(path);
    require(bool(os), ErrorKind::Io, "cannot open " + path);
    write_jsonl(os, t);
}

CoefficientTensor read_jsonl(std::istream& is, int n)
{
    CoefficientTensor t(n);
    bool wav = false;
    std::vector<std::tuple<MultiIndex, int, Lattice, cplx>> recs;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            fail(ErrorKind::Io, std::string("bad tensor record: ") + e.what());
        }
        MultiIndex b{{0, 0}, n};
        Lattice m{0, 0};
        const auto be = rec.at("beta").get<std::vector<int>>();
        const auto mm = rec.at("m").get<std::vector<long>>();
        require(int(be.size()) == n && int(mm.size()) == n, ErrorKind::Io, "tensor record dimension mismatch");
        for (int a = 0; a < n; ++a) {
            b.c[std::size_t(a)] = be[std::size_t(a)];
            m[std::size_t(a)] = mm[std::size_t(a)];
        }
        if (rec.contains("flavor") && rec["flavor"] == "wavelet") wav = true;
        recs.emplace_back(b, rec.at("j").get<int>(), m, cplx(rec.at("re").get<double>(), rec.value("im", 0.0)));
    }
    if (wav) t = CoefficientTensor(n, Indexing::Wavelet);
    for (const auto& [b, j, m, v] : recs) t.set(b, j, m, v);
    return t;
}

CoefficientTensor read_jsonl(const std::string& path, int n)
{
    std::ifstream is(path);
    require(bool(is), ErrorKind::Io, "cannot open " + path);
    return read_jsonl(is, n);
}

} // namespace qf
