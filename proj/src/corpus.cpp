#include "qf/corpus.hpp"

#include <cmath>
#include <random>

namespace qf {

namespace {

struct Gaussian {
    Point c{0.0, 0.0};
    double w = 1.0;
    double a = 1.0;
};

std::vector<Gaussian> draw(std::mt19937_64& rng, int n, Box centres, double wmin, double wmax)
{
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Gaussian> out(std::size_t(count(rng)));
    for (auto& g : out) {
        for (int k = 0; k < n; ++k) {
            const auto i = std::size_t(k);
            g.c[i] = centres.lo[i] + (centres.hi[i] - centres.lo[i]) * u01(rng);
        }
        g.w = wmin * std::pow(wmax / wmin, u01(rng));
        g.a = (0.5 + u01(rng)) * (u01(rng) < 0.5 ? -1.0 : 1.0);
    }
    return out;
}

double sum_at(const std::vector<Gaussian>& gs, const Point& x, int n)
{
    double v = 0.0;
    for (const auto& g : gs) {
        double r2 = 0.0;
        for (int k = 0; k < n; ++k) r2 += (x[std::size_t(k)] - g.c[std::size_t(k)]) * (x[std::size_t(k)] - g.c[std::size_t(k)]);
        v += g.a * std::exp(-r2 / (2.0 * g.w * g.w));
    }
    return v;
}

} // namespace

std::vector<RealField> gaussian_corpus(const GridSpec& g, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const double r = 0.25 * g.L;
    std::vector<RealField> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto gs = draw(rng, g.n, Box{{-r, -r}, {r, r}}, 0.2, 2.0);
        out.push_back(RealField::sample(g, [&](const Point& x) { return sum_at(gs, x, g.n); }));
    }
    return out;
}

std::vector<RealField> boundary_vanishing_corpus(const GridSpec& g, const DomainSpec& omega, std::size_t count,
                                                 std::uint64_t seed)
{
    const Box b = omega.bounds();
    require(omega.box_inside(b), ErrorKind::DomainInvalid, "boundary-vanishing corpus needs an interval or square");
    double side = b.hi[0] - b.lo[0];
    if (g.n == 2) side = std::min(side, b.hi[1] - b.lo[1]);
    std::mt19937_64 rng(seed);
    std::vector<RealField> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto gs = draw(rng, g.n, b, 0.1 * side, 0.5 * side);
        out.push_back(RealField::sample(g, [&](const Point& x) {
            double damp = 1.0;
            for (int k = 0; k < g.n; ++k) {
                const auto a = std::size_t(k);
                const double lo = b.lo[a], hi = b.hi[a];
                if (!(x[a] > lo && x[a] < hi)) return 0.0;
                const double half = 0.5 * (hi - lo);
                damp *= std::pow((x[a] - lo) * (hi - x[a]) / (half * half), 4);
            }
            return damp * sum_at(gs, x, g.n);
        }));
    }
    return out;
}

} // namespace qf
