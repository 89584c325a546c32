#include "doctest.h"
#include "qf/littlewood_paley.hpp"
#include "support.hpp"

using namespace qf;

namespace {

// Fourier synthesis of a band-limited real field with frequencies |xi| <= band
RealField band_limited(const GridSpec& g, double band)
{
    FrequencyField F{g, Vec<cplx>::Zero(g.size())};
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = g.index(i);
        const double x0 = g.freq(k[0]), x1 = g.n == 2 ? g.freq(k[1]) : 0.0;
        if (std::hypot(x0, x1) <= band) F.coeff[i] = std::exp(-(x0 * x0 + x1 * x1));
    }
    return real_part(dft_inverse(F));
}

} // namespace

TEST_CASE("dyadic resolution examples")
{
    CHECK(phi0({0.0, 0.0}, 1) == 1.0);
    CHECK(phi0({0.0, 0.0}, 2) == 1.0);
    for (double xi = -2.0; xi <= 2.0; xi += 0.01) CHECK(phi_level({xi, 0}, 1, 0) + phi_level({xi, 0}, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-32.0, 32.0);
    const GridSpec g = GridSpec::standard(1);
    for (int t = 0; t < 100; ++t) {
        const double xi = g.freq(int(std::lround(u(rng) / (2 * pi / g.L)) + g.N) % g.N);
        double s = 0.0;
        for (int j = 0; j <= 5; ++j) s += phi_level({xi, 0.0}, 1, j);
        CHECK(std::abs(s - 1.0) <= 1e-12);
    }
}

TEST_CASE("levels at a pure tone match the oracle profile")
{
    const GridSpec g = GridSpec::make(1, 4096, 2 * pi * 16);  // xi = 3 is a grid frequency
    const ResolutionOfUnity res = build_resolution(g);
    const ComplexField f = ComplexField::sample(g, [](const Point& x) { return std::polar(1.0, 3.0 * x[0]); });
    for (int j = 0; j <= res.j_max; ++j) {
        const ComplexField b = lp_block(f, res, j);
        const double expect = qft::oracles()["phi_at_3"].contains(std::to_string(j))
                                  ? qft::oracles()["phi_at_3"][std::to_string(j)].get<double>()
                                  : 0.0;
        CHECK(std::abs(b.values()[0] - expect * f.values()[0]) < 1e-10);
    }
}

TEST_CASE("blocks of band-limited fields")
{
    const GridSpec g = GridSpec::standard(1);
    const ResolutionOfUnity res = build_resolution(g);
    const RealField f = band_limited(g, 1.0);
    CHECK(sup_norm(lp_block(f, res, 1)) < 1e-14 * sup_norm(f));
    const RealField bump = RealField::sample(g, [](const Point& x) { return qft::gauss(x, 1, 0.2, 0.5); });
    ComplexField sum(g);
    for (int j = 0; j <= res.j_max; ++j) sum += lp_block(bump, res, j);
    CHECK((sum.values() - to_complex(bump).values()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("reference norm: zero, homogeneity, finite blocks")
{
    const GridSpec g = GridSpec::standard(1);
    const ResolutionOfUnity res = build_resolution(g);
    const SpaceSpec b{Family::B, 1.0, 2.0, 2.0, 0.0, 0.0};
    CHECK(reference_norm(RealField(g), b, res) == 0.0);
    const RealField f = RealField::sample(g, [](const Point& x) { return qft::gauss(x, 1, 0.0, 0.6); });
    CHECK(reference_norm(-3.0 * f, b, res) == doctest::Approx(3.0 * reference_norm(f, b, res)).epsilon(1e-13));

    // only levels 0 and 1 see a field band-limited to |xi| <= 1; s = 0, q = inf is the max block norm
    const RealField bl = band_limited(g, 1.0);
    const SpaceSpec z{Family::B, 0.0, 2.0, std::numeric_limits<double>::infinity(), 0.0, 0.0};
    const NormReport r = reference_norm_report(to_complex(bl), z, res);
    for (std::size_t j = 2; j < r.per_level.size(); ++j) CHECK(r.per_level[j] < 1e-14 * r.per_level[0]);
    CHECK(r.value == doctest::Approx(std::max(lp_norm(lp_block(bl, res, 0), 2.0), lp_norm(lp_block(bl, res, 1), 2.0))));
}

TEST_CASE("B^1_{2,2} is equivalent to the Sobolev multiplier norm")
{
    const GridSpec g = GridSpec::standard(1);
    const ResolutionOfUnity res = build_resolution(g);
    const SpaceSpec b{Family::B, 1.0, 2.0, 2.0, 0.0, 0.0};
    for (double w : {0.2, 0.5, 1.0, 2.0}) {
        const RealField f = RealField::sample(g, [&](const Point& x) { return qft::gauss(x, 1, 0.1, w); });
        const FrequencyField F = dft_forward(f);
        double h1 = 0.0;
        for (int k = 0; k < g.N; ++k) h1 += (1 + std::pow(g.freq(k), 2)) * std::norm(F.coeff[k]);
        h1 = std::sqrt(h1 * 2 * pi / g.L);
        const double ratio = reference_norm(f, b, res) / h1;
        CHECK(ratio >= 1.0 / 3.0);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("weights")
{
    const GridSpec g = GridSpec::standard(1);
    const WeightReport w0 = weight_eval(0.0, g);
    CHECK(w0.w.values().cwiseAbs().maxCoeff() == 1.0);
    CHECK(w0.w.values().minCoeff() == 1.0);
    for (double d : {-2.0, -0.5, 1.0, 2.0}) CHECK(weight_value(d, {0.0, 0.0}, 2) == 1.0);
    const WeightReport w2 = weight_eval(2.0, g);
    CHECK(std::isfinite(w2.c_shift));
    CHECK(w2.c_shift <= 4.0);
}

TEST_CASE("space spec indices")
{
    const SpaceSpec f{Family::F, 0.1, 0.5, 0.5, 0.0, 0.0};
    CHECK(f.sigma_pq(1) == doctest::Approx(1.0));
    CHECK(f.sigma_p(2) == doctest::Approx(2.0));
    const SpaceSpec bad{Family::F, 1.0, std::numeric_limits<double>::infinity(), 2.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), Error);
}
