#include <sstream>

#include "doctest.h"
#include "qf/sequence_norms.hpp"
#include "support.hpp"

using namespace qf;

namespace {

const MultiIndex b0{{0, 0}, 1};

SequenceSpec plain(Family fam, double s, double p, double q)
{
    SequenceSpec spec;
    spec.space = SpaceSpec{fam, s, p, q, 0.0, 0.0};
    spec.flavor = Flavor::Plain;
    spec.grid = GridSpec::standard(1);
    return spec;
}

// random plain tensor with at most `count` entries on levels 0..6 inside the box
CoefficientTensor random_tensor(std::uint64_t seed, int count, bool signed_values = true)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> lev(0, 6);
    std::uniform_real_distribution<double> val(signed_values ? -1.0 : 0.05, 1.0), pos(-20.0, 20.0);
    CoefficientTensor t(1);
    for (int e = 0; e < count; ++e) {
        const int j = lev(rng);
        const long m = long(std::floor(std::ldexp(pos(rng), j)));
        t.slab(b0, j, {m, 0}, {1, 1});
        t.set(b0, j, {m, 0}, val(rng));
    }
    return t;
}

// direct pointwise evaluation of the f-norm: each grid point collects 2^{js}|lambda| of the cells containing it
double brute_f_norm(const CoefficientTensor& t, const GridSpec& g, double s, double p, double q)
{
    double total = 0.0;
    for (int i = 0; i < g.N; ++i) {
        const double x = g.coord(i);
        double inner = 0.0;
        t.for_each([&](const MultiIndex&, int j, const Lattice& m, cplx v) {
            const double lo = std::ldexp(double(m[0]), -j), hi = std::ldexp(double(m[0] + 1), -j);
            if (x >= lo && x < hi) inner += std::pow(std::pow(2.0, j * s) * std::abs(v), q);
        });
        total += std::pow(inner, p / q);
    }
    return std::pow(total * g.h(), 1.0 / p);
}

} // namespace

TEST_CASE("tensor storage")
{
    CoefficientTensor t(1);
    t.slab(b0, 2, {-3, 0}, {4, 1});
    t.set(b0, 2, {-2, 0}, 1.5);
    t.slab(b0, 2, {5, 0}, {2, 1});  // grows the window
    t.set(b0, 2, {6, 0}, -2.0);
    CHECK(t.get(b0, 2, {-2, 0}) == cplx(1.5));
    CHECK(t.get(b0, 2, {6, 0}) == cplx(-2.0));
    CHECK(t.get(b0, 2, {0, 0}) == cplx(0.0));
    CHECK(t.get(b0, 3, {0, 0}) == cplx(0.0));
    CHECK(t.nonzeros() == 2);
    CHECK(t.max_abs() == 2.0);
    const CoefficientTensor c = t.combine(2.0, t, -1.0);
    CHECK(c.get(b0, 2, {6, 0}) == cplx(-2.0));
}

TEST_CASE("single entry plain b-norm")
{
    for (int j0 : {0, 3, 5}) {
        CoefficientTensor t(1);
        t.slab(b0, j0, {7, 0}, {1, 1});
        t.set(b0, j0, {7, 0}, 1.0);
        const double s = 0.7, p = 1.5;
        CHECK(sequence_norm(t, plain(Family::B, s, p, 3.0)) ==
              doctest::Approx(std::pow(2.0, j0 * (s - 1.0 / p))).epsilon(1e-14));
    }
}

TEST_CASE("b and f flavors agree when p = q")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CoefficientTensor t = random_tensor(seed, 60);
        for (double p : {1.0, 2.0, 0.7}) {
            const double b = sequence_norm(t, plain(Family::B, 0.4, p, p));
            const double f = sequence_norm(t, plain(Family::F, 0.4, p, p));
            CHECK(std::abs(b - f) <= 1e-12 * b);
        }
    }
}

TEST_CASE("f-norm matches direct grid summation")
{
    const GridSpec g = GridSpec::standard(1);
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
        const CoefficientTensor t = random_tensor(seed, 200);
        const double lib = sequence_norm(t, plain(Family::F, 0.7, 1.5, 3.0));
        CHECK(std::abs(lib - brute_f_norm(t, g, 0.7, 1.5, 3.0)) <= 1e-10 * lib);
    }
}

TEST_CASE("positivity split")
{
    CoefficientTensor pos = random_tensor(3, 40, false);
    CHECK(positivity_split(pos).minus.nonzeros() == 0);

    CoefficientTensor t(1);
    t.slab(b0, 1, {0, 0}, {2, 1});
    t.set(b0, 1, {0, 0}, 2.0);
    t.set(b0, 1, {1, 0}, -3.0);
    const SplitTensors s = positivity_split(t);
    CHECK(s.plus.get(b0, 1, {0, 0}) == cplx(2.0));
    CHECK(s.plus.get(b0, 1, {1, 0}) == cplx(0.0));
    CHECK(s.minus.get(b0, 1, {0, 0}) == cplx(0.0));
    CHECK(s.minus.get(b0, 1, {1, 0}) == cplx(3.0));

    t.set(b0, 1, {0, 0}, cplx(1.0, 0.5));
    CHECK_THROWS_AS(positivity_split(t), Error);
}

TEST_CASE("split norms bracket the norm")
{
    for (std::uint64_t seed = 20; seed < 30; ++seed) {
        const CoefficientTensor t = random_tensor(seed, 80);
        const SplitTensors s = positivity_split(t);
        for (auto [p, q] : {std::pair{1.0, 1.0}, std::pair{2.0, 2.0}, std::pair{1.0, 4.0}}) {
            const SequenceSpec spec = plain(Family::B, 0.5, p, q);
            const double whole = sequence_norm(t, spec);
            const double parts = sequence_norm(s.plus, spec) + sequence_norm(s.minus, spec);
            CHECK(parts >= whole * (1 - 1e-12));
            CHECK(parts <= 2 * whole * (1 + 1e-12));
        }
    }
}

TEST_CASE("beta weighting and kappa")
{
    CoefficientTensor t(1);
    const MultiIndex b2{{2, 0}, 1};
    t.slab(b0, 0, {0, 0}, {1, 1});
    t.set(b0, 0, {0, 0}, 1.0);
    t.slab(b2, 0, {0, 0}, {1, 1});
    t.set(b2, 0, {0, 0}, 0.5);
    SequenceSpec spec = plain(Family::B, 1.0, 2.0, 2.0);
    spec.flavor = Flavor::Quark;
    CHECK(sequence_norm(t, spec) == doctest::Approx(1.0));
    spec.space.kappa = 1.0;  // 2^{2} * 0.5 = 2 beats 1
    const SequenceNormReport r = sequence_norm_report(t, spec);
    CHECK(r.value == doctest::Approx(2.0));
    CHECK(r.beta_argmax == b2);
    spec.flavor = Flavor::Wavelet;
    CHECK_THROWS_AS(sequence_norm(t, spec), Error);
}

TEST_CASE("coefficient lines round trip")
{
    CoefficientTensor t = random_tensor(7, 30);
    t.set(b0, t.slabs().front().j, t.slabs().front().lo, cplx(0.25, -0.125));
    std::stringstream ss;
    write_jsonl(ss, t);
    const CoefficientTensor back = read_jsonl(ss, 1);
    CHECK(back.nonzeros() == t.nonzeros());
    t.for_each([&](const MultiIndex& b, int j, const Lattice& m, cplx v) { CHECK(back.get(b, j, m) == v); });
}

TEST_CASE("real projection")
{
    CoefficientTensor t(1);
    t.slab(b0, 0, {0, 0}, {2, 1});
    t.set(b0, 0, {0, 0}, cplx(1.0, 1e-14));
    project_real(t);
    CHECK(t.get(b0, 0, {0, 0}) == cplx(1.0));
    t.set(b0, 0, {1, 0}, cplx(0.0, 0.5));
    CHECK_THROWS_AS(project_real(t), Error);
}
