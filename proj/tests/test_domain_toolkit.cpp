#include <set>

#include "doctest.h"
#include "qf/corpus.hpp"
#include "qf/domain.hpp"
#include "support.hpp"

using namespace qf;

namespace {

const GridSpec g1 = GridSpec::standard(1);

const QuarkSystem& sys1()
{
    static const QuarkSystem s = QuarkSystem::build(g1);
    return s;
}

// smooth bump supported on (a, b)
double compact(double x, double a, double b)
{
    const double u = (2 * x - a - b) / (b - a);
    return std::abs(u) < 1 ? std::exp(-1 / (1 - u * u)) : 0.0;
}

} // namespace

TEST_CASE("Whitney cover of the unit interval matches the greedy oracle")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 1.0}});
    const WhitneyCover cover = whitney_decompose(omega, 2, 6, g1);
    const auto& golden = qft::oracles()["whitney_0_1_K2_J6"];
    REQUIRE(cover.cubes.size() == golden.size());
    const auto js = cover.to_json(omega);
    for (std::size_t i = 0; i < golden.size(); ++i) {
        CHECK(cover.cubes[i].J == golden[i]["J"].get<int>());
        CHECK(cover.cubes[i].M[0] == golden[i]["M"][0].get<long>());
        CHECK(js[i]["dist_lower"].get<double>() == doctest::Approx(golden[i]["dist_lower"].get<double>()).epsilon(1e-15));
        CHECK(js[i]["dist_upper"].get<double>() == doctest::Approx(golden[i]["dist_upper"].get<double>()).epsilon(1e-15));
    }
    // grid count of the open interval drops one boundary node per side
    const double exact = qft::oracles()["uncovered_0_1_K2_J6"].get<double>();
    CHECK(cover.uncovered_measure <= exact);
    CHECK(cover.uncovered_measure >= exact - 2 * g1.h());
    CHECK(cover.uncovered_measure <= 4 * 2 * std::ldexp(1.0, -6));
}

TEST_CASE("Whitney invariants on an L-shape")
{
    const GridSpec g2 = GridSpec::standard(2);
    const DomainSpec omega = DomainSpec::l_shape(0.0, 2.0);
    const int K = 2;
    const WhitneyCover cover = whitney_decompose(omega, K, 4, g2);
    for (std::size_t a = 0; a < cover.cubes.size(); ++a) {
        const Box A = cover.cubes[a].box(2);
        CHECK(omega.box_inside(A));
        const double d = omega.boundary_distance(A);
        const double w = std::ldexp(1.0, -cover.cubes[a].J);
        CHECK(d >= K * w - 1e-15);
        CHECK(d <= (4 * K + 4) * w + 1e-15);
        for (std::size_t b = a + 1; b < cover.cubes.size(); ++b) {
            const Box B = cover.cubes[b].box(2);
            const double ov = std::max(0.0, std::min(A.hi[0], B.hi[0]) - std::max(A.lo[0], B.lo[0])) *
                              std::max(0.0, std::min(A.hi[1], B.hi[1]) - std::max(A.lo[1], B.lo[1]));
            CHECK(ov == 0.0);
        }
    }
    CHECK_THROWS_AS(whitney_decompose(DomainSpec::intervals({{0.0, 0.01}}), 2, 3, g1), Error);
}

TEST_CASE("domain shapes reject bad input")
{
    CHECK_THROWS_AS(DomainSpec::intervals({}), Error);
    CHECK_THROWS_AS(DomainSpec::intervals({{1.0, 0.0}}), Error);
    CHECK_THROWS_AS(DomainSpec::square(0.0, 0.0), Error);
    CHECK_THROWS_AS(DomainSpec::from_json(1, "blob", nlohmann::json::array()), Error);
    const DomainSpec sq = DomainSpec::square(0.0, 1.0);
    CHECK(sq.contains({0.5, 0.5}));
    CHECK_FALSE(sq.contains({1.5, 0.5}));
    CHECK(sq.boundary_distance(Point{0.5, 0.25}) == doctest::Approx(0.25));
    CHECK(box_distance({{0, 0}, {1, 1}}, {{2, 0}, {3, 1}}, 2) == doctest::Approx(1.0));
    CHECK(box_distance({{0, 0}, {1, 1}}, {{2, 3}, {3, 4}}, 2) == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("partition of unity on the covered region")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 2.0}});
    const WhitneyCover cover = whitney_decompose(omega, 2, 6, g1);
    const DomainPartition part = build_domain_partition(cover, omega, g1);
    const RealField tot = part.total();
    std::size_t checked = 0;
    for (Eigen::Index i = 0; i < g1.size(); ++i) {
        const double x = g1.point(i)[0];
        bool covered = false;
        for (const auto& q : cover.cubes) {
            const Box b = q.box(1);
            covered = covered || (x >= b.lo[0] && x < b.hi[0]);
        }
        if (!covered) continue;
        CHECK(std::abs(tot[i] - 1.0) < 1e-10);
        ++checked;
    }
    CHECK(checked > 100);

    // supp rho inside 2Q
    for (std::size_t p = 0; p < part.pieces.size(); ++p) {
        const RealField r = part.piece(p);
        const Box b = cover.cubes[p].box(1);
        const double c = 0.5 * (b.lo[0] + b.hi[0]), w = b.hi[0] - b.lo[0];
        for (Eigen::Index i = 0; i < g1.size(); ++i)
            if (std::abs(g1.point(i)[0] - c) >= w) CHECK(r[i] == 0.0);
    }

    const PartitionConstants pc = partition_constants(part);
    double lo0 = 1e300, hi0 = 0, lo1 = 1e300, hi1 = 0;
    for (std::size_t l = 0; l < pc.levels.size(); ++l) {
        if (pc.levels[l] < 2 || pc.levels[l] > 5) continue;
        lo0 = std::min(lo0, pc.c[l][0]);
        hi0 = std::max(hi0, pc.c[l][0]);
        lo1 = std::min(lo1, pc.c[l][1]);
        hi1 = std::max(hi1, pc.c[l][1]);
    }
    CHECK(hi0 <= 2 * lo0);
    CHECK(hi1 <= 2 * lo1);
}

TEST_CASE("refined localization norm")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 16.0}});
    const WhitneyCover cover = whitney_decompose(omega, 2, 6, g1);
    const DomainPartition part = build_domain_partition(cover, omega, g1);
    const ResolutionOfUnity res = build_resolution(g1);
    const SpaceSpec spec{Family::F, 1.2, 2, 2, 0, 0};

    CHECK(rloc_norm(RealField(g1), spec, part, res) == 0.0);

    // rho_{0,5} = 1 on [5.25, 5.75]
    const RealField f = RealField::sample(g1, [](const Point& x) { return compact(x[0], 5.3, 5.7); });
    CHECK(rloc_norm(f, spec, part, res) == doctest::Approx(reference_norm(to_complex(f), spec, res)).epsilon(1e-10));

    CHECK_THROWS_AS(rloc_norm(f, {Family::B, 1.2, 2, 2, 0, 0}, part, res), Error);
    CHECK_THROWS_AS(rloc_norm(f, {Family::F, 0.1, 0.5, 2, 0, 0}, part, res), Error);

    // independence of the partition
    const DomainPartition other = build_domain_partition(cover, omega, g1, 1.9);
    const auto corpus = boundary_vanishing_corpus(g1, omega, 10, 3);
    for (const RealField& c : corpus) {
        const double r = rloc_norm(c, spec, part, res) / rloc_norm(c, spec, other, res);
        CHECK(r >= 1.0 / 20);
        CHECK(r <= 20.0);
    }
}

TEST_CASE("domain index set")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 1.0}});
    const WhitneyCover c4 = whitney_decompose(omega, 2, 4, g1);
    const auto idx = domain_index_set(c4, 6);
    CHECK(idx.size() == qft::oracles()["whitney_0_1_K2_J4_count_j6"].get<std::size_t>());
    const std::set<DomainIndex> set(idx.begin(), idx.end());
    for (const auto& q : c4.cubes) CHECK(set.count({q.J, q.M}) == 1);
    for (const auto& d : idx) {
        int host = -1;
        for (const auto& q : c4.cubes) {
            const double w = std::ldexp(1.0, -d.j);
            const Box b = q.box(1);
            if (d.m[0] * w >= b.lo[0] && (d.m[0] + 1) * w <= b.hi[0]) host = q.J;
        }
        REQUIRE(host >= 0);
        CHECK(d.j >= host);
    }
}

TEST_CASE("domain synthesis and analysis")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 16.0}});
    const WhitneyCover cover = whitney_decompose(omega, 2, 6, g1);
    const DomainPartition part = build_domain_partition(cover, omega, g1);
    const MultiIndex b0{{0, 0}, 1};

    // a quark in the plateau of rho_{0,5}
    const Lattice m{43, 0};
    REQUIRE(quark_hosted(sys1(), cover, omega, 3, m));
    const RealField q = sys1().quark_eval(b0, 3, m);

    CoefficientTensor one(1);
    one.slab(b0, 3, m, {1, 1});
    one.set(b0, 3, m, 1.0);
    const ComplexField s = domain_synthesize(one, sys1(), cover, omega);
    CHECK((s.values() - to_complex(q).values()).cwiseAbs().maxCoeff() < 1e-14);

    CoefficientTensor outside(1);
    outside.slab(b0, 3, {-20, 0}, {1, 1});
    outside.set(b0, 3, {-20, 0}, 1.0);
    CHECK_THROWS_AS(domain_synthesize(outside, sys1(), cover, omega), Error);

    const CoefficientTensor dl = domain_analyze(q, sys1(), part, omega, 3, 6);
    const CoefficientTensor rl = analyze(q, sys1(), {3, 6, Regime::Positive, 0});
    REQUIRE(dl.nonzeros() > 0);
    double worst = 0.0;
    dl.for_each([&](const MultiIndex& beta, int j, const Lattice& mm, cplx v) {
        worst = std::max(worst, std::abs(v - rl.get(beta, j, mm)));
    });
    CHECK(worst < 1e-8);

    // everything synthesized lives in Omega
    const auto inside = omega.mask(g1);
    const ComplexField back = domain_synthesize(dl, sys1(), cover, omega);
    double out = 0.0;
    for (Eigen::Index i = 0; i < g1.size(); ++i)
        if (!inside[std::size_t(i)]) out = std::max(out, std::abs(back[i]));
    CHECK(out <= 1e-12);
}

TEST_CASE("domain positivity")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 1.0}});
    const WhitneyCover cover = whitney_decompose(omega, 2, 6, g1);
    const DomainPartition part = build_domain_partition(cover, omega, g1);
    const RealField f = boundary_vanishing_corpus(g1, omega, 1, 11).front();
    const CoefficientTensor lam = domain_analyze(f, sys1(), part, omega, 3, 6);
    const SplitTensors sp = positivity_split(lam);
    const ComplexField f1 = domain_synthesize(sp.plus, sys1(), cover, omega);
    const ComplexField f2 = domain_synthesize(sp.minus, sys1(), cover, omega);
    const double tol = 1e-10 * sup_norm(f);
    CHECK(f1.values().real().minCoeff() >= -tol);
    CHECK(f2.values().real().minCoeff() >= -tol);
    const ComplexField direct = domain_synthesize(lam, sys1(), cover, omega);
    CHECK(((f1 - f2).values() - direct.values()).cwiseAbs().maxCoeff() <= tol);
}

TEST_CASE("localization principle")
{
    const ResolutionOfUnity res = build_resolution(g1);
    const SpaceSpec spec{Family::F, 1.0, 2, 2, 0, 0};
    const LocalizationReport z = localization_check({RealField(g1)}, spec, res);
    CHECK(z.rows[0].reference == 0.0);
    CHECK(z.rows[0].localized == 0.0);
    const LocalizationReport r = localization_check(gaussian_corpus(g1, 10, 5), spec, res);
    CHECK(r.spread <= 20.0);
}

TEST_CASE("distance-weighted Lp")
{
    const DomainSpec omega = DomainSpec::intervals({{0.0, 4.0}});
    const RealField one = RealField::sample(g1, [](const Point& x) { return x[0] > 0 && x[0] < 4 ? 1.0 : 0.0; });
    // delta = 1 on [1, 3], so s = 0 gives the plain measure
    CHECK(distance_weighted_lp(one, omega, 0.0, 1.0) == doctest::Approx(4.0).epsilon(2 * g1.h()));
    CHECK(distance_weighted_lp(RealField(g1), omega, 1.0, 2.0) == 0.0);
}
