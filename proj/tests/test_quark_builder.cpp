#include "doctest.h"
#include "qf/quark_system.hpp"
#include "support.hpp"

using namespace qf;

namespace {

const QuarkSystem& system1()
{
    static const QuarkSystem s = QuarkSystem::build(GridSpec::standard(1));
    return s;
}

const QuarkSystem& system2()
{
    static const QuarkSystem s = QuarkSystem::build(GridSpec::standard(2));
    return s;
}

} // namespace

TEST_CASE("integer translates of the bump sum to one")
{
    for (const QuarkSystem* s : {&system1(), &system2()}) {
        CHECK(partition_defect(s->quark()) <= 1e-10);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        for (int t = 0; t < 1000; ++t) {
            const Point x{u(rng), u(rng)};
            double sum = 0.0;
            for (long m0 = -3; m0 <= 3; ++m0)
                for (long m1 = (s->n() == 2 ? -3 : 0); m1 <= (s->n() == 2 ? 3 : 0); ++m1)
                    sum += s->quark().eval({x[0] - std::floor(x[0]) - m0 + 0.0, x[1] - std::floor(x[1]) - m1 + 0.0},
                                           {{0, 0}, s->n()});
            CHECK(std::abs(sum - 1.0) <= 1e-10);
        }
    }
}

TEST_CASE("J and eps follow from the support radius")
{
    for (int n : {1, 2}) {
        const auto& o = qft::oracles()["J_eps"][std::to_string(n)];
        const QuarkTemplate& t = (n == 1 ? system1() : system2()).quark();
        CHECK(t.J == o["J"].get<int>());
        CHECK(t.eps == doctest::Approx(o["eps"].get<double>()).epsilon(1e-12));
    }
}

TEST_CASE("a coarse grid is rejected")
{
    CHECK_THROWS_AS(build_base_bump(GridSpec::make(1, 64, 64.0)), Error);
}

TEST_CASE("quark evaluation")
{
    const QuarkSystem& s = system1();
    const MultiIndex b0{{0, 0}, 1}, b1{{1, 0}, 1};
    CHECK(s.quark_eval(b0, 0, {0, 0}).values() == s.quark().k.values());

    // rescaled translates share the sup; beta = 0 peaks on the plateau where k = 1
    const double s00 = sup_norm(s.quark_eval(b0, 0, {0, 0}));
    CHECK(sup_norm(s.quark_eval(b0, 3, {5, 0})) == s00);
    CHECK(sup_norm(s.quark_eval(b0, 2, {-7, 0})) == s00);
    const double s10 = sup_norm(s.quark_eval(b1, 0, {0, 0}));
    CHECK(sup_norm(s.quark_eval(b1, 2, {3, 0})) == doctest::Approx(s10).epsilon(1e-4));

    // dense-grid oracle for sup (2^-J x) k(x)
    CHECK(s10 <= 0.95 * s00);
    // grid samples never exceed the true max; the max sits where k leaves its plateau, so sampling costs ~1e-3
    const double sup_oracle = qft::oracles()["sup_k_beta1"].get<double>();
    CHECK(s10 <= sup_oracle + 1e-12);
    CHECK(s10 >= sup_oracle - 2e-3);

    // the peak of k^0_{3,5} sits on the rescaled plateau
    const RealField q = s.quark_eval(b0, 3, {5, 0});
    Eigen::Index arg;
    q.values().maxCoeff(&arg);
    const auto peak = qft::oracles()["quark_3_5_peak"];
    const double x = s.grid().point(arg)[0];
    CHECK(x >= peak[0].get<double>() - s.grid().h());
    CHECK(x <= peak[1].get<double>() + s.grid().h());

    for (const MultiIndex& beta : s.betas()) CHECK(s.quark_eval(beta, 1, {2, 0}).values().minCoeff() >= 0.0);
    CHECK_THROWS_AS(s.quark_eval({{5, 0}, 1}, 0, {0, 0}), Error);
    CHECK_THROWS_AS(s.quark_eval(b0, 0, {40, 0}), Error);
}

TEST_CASE("lattice coefficients of omega^0 against direct quadrature")
{
    const QuarkSystem& s = system1();
    const OmegaAxis& om = s.omega(0);
    // composite Simpson on [-pi, pi]; the profile is smooth with compact support inside
    const int n = 20000;
    for (int m : {0, 1, 2, 5, 9}) {
        cplx acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = -pi + 2 * pi * i / n;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * omega_profile(x) * std::polar(1.0, m * x);
        }
        acc *= 2 * pi / n / 3.0;
        const cplx expect = acc / (2 * pi) / std::sqrt(2 * pi);
        CHECK(std::abs(om.coeff[std::size_t(m + om.M_max)] - expect) < 1e-10);
    }
    CHECK(om.shell_ratio < 1e-12);
}

TEST_CASE("dual templates: realness, low band, vanishing moments")
{
    for (const QuarkSystem* s : {&system1(), &system2()}) {
        for (const DualTemplate& d : s->duals()) {
            CHECK(d.imag_F < 1e-10);
            CHECK(d.imag_M < 1e-10);
            CHECK(d.low_band_leak < 1e-10);
        }
        const MomentReport m = verify_moments(*s);
        CHECK(m.pass);
        CHECK(m.rows.size() == s->betas().size() * enumerate_multi_indices(s->n(), 4).size());
    }
}

TEST_CASE("dual evaluation")
{
    const QuarkSystem& s = system1();
    const MultiIndex b0{{0, 0}, 1}, b2{{2, 0}, 1};
    CHECK((s.dual_eval(b2, 0, {0, 0}).values() - s.dual(b2).phi_F.values()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(sup_norm(s.dual_eval(b2, 2, {0, 0})) == doctest::Approx(sup_norm(s.dual_eval(b2, 1, {0, 0}))).epsilon(1e-4));
    const RealField one = RealField::sample(s.grid(), [](const Point&) { return 1.0; });
    CHECK(std::abs(pairing(s.dual_eval(b0, 3, {0, 0}), one)) < 1e-9);
}

TEST_CASE("decay tables")
{
    const QuarkSystem& s = system1();
    const DecayReport d = verify_decay(s, {0.0, 3.0});
    // beta = 0 carries no kappa factor
    for (const auto& row : d.rows)
        if (row.beta.order() == 0) CHECK(std::isfinite(row.log2_sup));
    // quark side at kappa = eps/2 is bounded: sup |2^{kappa|beta|} k^beta| decreases
    for (double q : d.quark_slope) CHECK(q <= 0.0);
}

TEST_CASE("manifest carries template checksums")
{
    const auto m = system1().manifest();
    CHECK(m["J"] == 1);
    CHECK(m["checksums"]["k"].get<std::string>() == hex64(checksum(system1().quark().k)));
    CHECK(m["checksums"]["duals"].size() == system1().betas().size());
}
