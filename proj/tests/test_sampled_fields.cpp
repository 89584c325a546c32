#include <filesystem>

#include "doctest.h"
#include "support.hpp"

using namespace qf;

TEST_CASE("forward transform of the zero field vanishes")
{
    const GridSpec g = GridSpec::standard(1);
    const FrequencyField F = dft_forward(RealField(g));
    CHECK(F.coeff.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a lowest discrete exponential has one coefficient")
{
    const GridSpec g = GridSpec::standard(1);
    const ComplexField f = ComplexField::sample(g, [&](const Point& x) { return std::polar(1.0, 2 * pi / g.L * x[0]); });
    FrequencyField F = dft_forward(f);
    CHECK(std::abs(F.coeff[1] - cplx(g.L / std::sqrt(2 * pi))) < 1e-10);
    F.coeff[1] = 0.0;
    CHECK(F.coeff.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Gaussian transform matches the closed form")
{
    const GridSpec g = GridSpec::standard(1);
    const FrequencyField F = dft_forward(RealField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0] / 2); }));
    const double step = 2 * pi / g.L;
    for (int xi : {0, 1, 2}) {
        // only xi = 0 is a grid frequency; 1 and 2 are checked at the nearest node
        const int k = int(std::lround(xi / step));
        const double expect = k == 0 ? qft::oracles()["gauss_ft"]["0"].get<double>() : std::exp(-std::pow(k * step, 2) / 2);
        CHECK(std::abs(F.coeff[k] - cplx(expect)) < 1e-10);
    }
}

TEST_CASE("round trip and Parseval")
{
    for (int n : {1, 2}) {
        const GridSpec g = GridSpec::standard(n);
        const ComplexField f = ComplexField::sample(g, [&](const Point& x) {
            return cplx(qft::gauss(x, n, 0.3, 0.7), std::sin(x[0]) * qft::gauss(x, n, -1.0, 1.3));
        });
        const ComplexField back = dft_inverse(dft_forward(f));
        CHECK((back.values() - f.values()).cwiseAbs().maxCoeff() / sup_norm(f) < 1e-12);
        const FrequencyField F = dft_forward(f);
        const double space = quadrature_integral(RealField(g, f.values().cwiseAbs2()));
        const double freq = F.coeff.squaredNorm() * std::pow(2 * pi / g.L, n);
        CHECK(std::abs(space - freq) / space < 1e-10);
    }
}

TEST_CASE("quadrature examples")
{
    const GridSpec g8 = GridSpec::make(1, 1024, 8.0);
    CHECK(quadrature_integral(RealField::sample(g8, [](const Point&) { return 1.0; })) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(quadrature_integral(RealField(g8)) == 0.0);
    const GridSpec g = GridSpec::standard(1);
    const RealField e = RealField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
    CHECK(std::abs(quadrature_integral(e) - qft::oracles()["sqrt_pi"].get<double>()) < 1e-12);
}

TEST_CASE("pairing is symmetric, bilinear, and matches closed forms")
{
    const GridSpec g = GridSpec::standard(1);
    const RealField e = RealField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
    const RealField h = RealField::sample(g, [](const Point& x) { return std::cos(x[0]) / (1 + x[0] * x[0]); });
    const RealField k = RealField::sample(g, [](const Point& x) { return std::tanh(x[0]) * std::exp(-std::abs(x[0])); });
    CHECK(pairing(e, RealField(g)) == 0.0);
    CHECK(std::abs(pairing(e, e) - qft::oracles()["sqrt_pi_half"].get<double>()) < 1e-12);
    CHECK(std::abs(pairing(e, h) - pairing(h, e)) < 1e-12);
    const double a = 1.7, b = -0.4;
    CHECK(std::abs(pairing(a * e + b * h, k) - (a * pairing(e, k) + b * pairing(h, k))) < 1e-12);
    const GridSpec g8 = GridSpec::make(1, 1024, 8.0);
    const RealField one = RealField::sample(g8, [](const Point&) { return 1.0; });
    CHECK(pairing(one, one) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("dilate-translate at j=0, m=0 is the identity bit for bit")
{
    const GridSpec g = GridSpec::standard(1);
    const RealField t = RealField::sample(g, [](const Point& x) { return qft::gauss(x, 1, 0.4, 0.3); });
    const RealField s = dilate_translate_sample(t, 0, {0.0, 0.0});
    CHECK(s.values() == t.values());
}

TEST_CASE("dilation shrinks support")
{
    const GridSpec g = GridSpec::standard(1);
    // bump inside (0.25, 1.75), well inside (0, 2)
    const RealField t = RealField::sample(g, [](const Point& x) {
        const double u = (x[0] - 1.0) / 0.75;
        return std::abs(u) < 1 ? std::exp(-1 / (1 - u * u)) : 0.0;
    });
    const RealField s = dilate_translate_sample(t, 1, {0.0, 0.0});
    for (Eigen::Index i = 0; i < s.values().size(); ++i) {
        const double x = g.point(i)[0];
        if (x <= 0.0 || x >= 1.0) CHECK(std::abs(s[i]) < 1e-12);
    }
}

TEST_CASE("spectral derivative examples")
{
    const GridSpec g = GridSpec::standard(1);
    const MultiIndex zero{{0, 0}, 1}, one{{1, 0}, 1}, two{{2, 0}, 1};
    const double w = 2 * pi / g.L;
    const RealField s = RealField::sample(g, [&](const Point& x) { return std::sin(w * x[0]); });
    CHECK(spectral_derivative(s, zero).values() == s.values());
    const RealField ds = spectral_derivative(s, one);
    const RealField expect = RealField::sample(g, [&](const Point& x) { return w * std::cos(w * x[0]); });
    CHECK((ds.values() - expect.values()).cwiseAbs().maxCoeff() < 1e-12);
    const RealField e = RealField::sample(g, [](const Point& x) { return std::exp(-x[0] * x[0]); });
    const RealField d2 = spectral_derivative(e, two);
    const RealField e2 =
        RealField::sample(g, [](const Point& x) { return (4 * x[0] * x[0] - 2) * std::exp(-x[0] * x[0]); });
    CHECK((d2.values() - e2.values()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("binary field format round trip keeps the checksum")
{
    const GridSpec g = GridSpec::make(2, 64, 8.0);
    const ComplexField f = ComplexField::sample(g, [](const Point& x) { return cplx(x[0], x[1] * x[1]); });
    const std::string path = (std::filesystem::temp_directory_path() / "qf_test_field.qfld").string();
    write_qfld(path, f);
    const ComplexField back = read_qfld(path);
    CHECK(back.grid() == g);
    CHECK(checksum(back) == checksum(f));
    std::filesystem::remove(path);
}

TEST_CASE("grid validation")
{
    CHECK_THROWS_AS(GridSpec::make(3, 64, 1.0), Error);
    CHECK_THROWS_AS(GridSpec::make(1, 100, 1.0), Error);
    CHECK_THROWS_AS(RealField(GridSpec::standard(1)) + RealField(GridSpec::make(1, 64, 64.0)), Error);
}
