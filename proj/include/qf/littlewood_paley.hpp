#pragma once

#include <string>
#include <vector>

#include "qf/grid.hpp"

namespace qf {

// C-infinity step: 1 for t <= 0, 0 for t >= 1, built from rho(t) = exp(-1/t)
double smooth_step(double t);
// even 1-D cutoff: 1 on [-a,a], 0 outside (-b,b)
double cutoff(double t, double a, double b);
inline double phi0_axis(double t) { return cutoff(t, 1.0, 1.5); }
// tensor phi_0 and the dyadic levels phi_j(xi) = phi_0(2^-j xi) - phi_0(2^{-j+1} xi)
double phi0(const Point& xi, int n);
double phi_level(const Point& xi, int n, int j);

enum class Family { B, F };

struct SpaceSpec {
    Family family = Family::B;
    double s = 0.0;
    double p = 2.0;
    double q = 2.0;
    double delta = 0.0;
    double kappa = 0.0;

    double sigma_p(int n) const;
    double sigma_pq(int n) const;
    void validate() const;
    std::string describe() const;
};

struct ResolutionOfUnity {
    GridSpec grid;
    int j_max = 0;
    Vec<double> phi0;
    std::vector<Vec<double>> levels;

    const Vec<double>& level(int j) const;
};

// j_max < 0 selects the grid's own limit
ResolutionOfUnity build_resolution(const GridSpec& g, int j_max = -1);

ComplexField lp_block(const ComplexField& f, const ResolutionOfUnity& res, int j);
ComplexField lp_block(const RealField& f, const ResolutionOfUnity& res, int j);

struct NormReport {
    double value = 0.0;
    std::vector<double> per_level;
};

NormReport reference_norm_report(const ComplexField& f, const SpaceSpec& spec, const ResolutionOfUnity& res);
double reference_norm(const ComplexField& f, const SpaceSpec& spec, const ResolutionOfUnity& res);
double reference_norm(const RealField& f, const SpaceSpec& spec, const ResolutionOfUnity& res);

inline double weight_value(double delta, const Point& x, int n)
{
    const double r2 = x[0] * x[0] + (n == 2 ? x[1] * x[1] : 0.0);
    return std::pow(1.0 + r2, 0.5 * delta);
}

struct WeightReport {
    RealField w;
    double c_grad = 0.0;   // sup |D w| / w over |gamma| = 1
    double c_hess = 0.0;   // sup |D^2 w| / w over |gamma| = 2
    double c_shift = 0.0;  // sup w(x) / (w(y)(1+|x-y|^2)^{alpha/2}) with alpha = |delta|
};

WeightReport weight_eval(double delta, const GridSpec& g);

// sup-modified L_p of a pointwise weight times |values|
double weighted_lp(const Vec<double>& abs_values, const GridSpec& g, double p);

} // namespace qf
