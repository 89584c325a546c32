#pragma once

#include <functional>
#include <vector>

#include "qf/frame_transform.hpp"

namespace qf {

struct PositivityReport {
    double min_f1 = 0.0;
    double min_f2 = 0.0;
    double sup_f1 = 0.0;
    double sup_f2 = 0.0;
    double residual_sup = 0.0;    // sup |f - (f1 - f2)|
    double split_identity = 0.0;  // sup |(f1 - f2) - synthesize(lambda)|
    double norm_sum_ratio = 0.0;  // (|f1| + |f2|) / |f| in the reference norm
    double sequence_sum_ratio = 0.0;
    double seq_plus = 0.0;
    double seq_minus = 0.0;
    RealField f1;
    RealField f2;
};

PositivityReport positivity_experiment(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg,
                                       const SpaceSpec& spec, const ResolutionOfUnity& res);

// |f1 f2| / (|f1| |f2|) in a B-space with s > n/p
double multiplication_algebra_probe(const RealField& f1, const RealField& f2, const SpaceSpec& spec,
                                    const ResolutionOfUnity& res);

// |g f| / (|g|_{C^rho} |f|) for s < 0; the Hoelder-Zygmund norm is the B^rho_{inf,inf} reference norm
double pointwise_multiplier_probe(const RealField& g, const RealField& f, const SpaceSpec& spec, double rho,
                                  const ResolutionOfUnity& res);

struct HomogeneityReport {
    std::vector<double> lambdas;
    std::vector<double> ratios;  // |f(lambda .)| / |f| with supp f inside the ball of radius lambda
    double slope = 0.0;
    double expected = 0.0;
};

// base has support radius base_radius <= 1; f = base(./lambda) is evaluated analytically on the grid
HomogeneityReport homogeneity_probe(const std::function<double(const Point&)>& base, double base_radius,
                                    const SpaceSpec& spec, const std::vector<double>& lambdas, const GridSpec& g);

// C^infinity bump of support radius 1/2 centred at the origin
double homogeneity_base_bump(const Point& x, int n);

struct DeltaProbe {
    std::string name;
    std::function<double(const Point&)> fn;
};

struct DeltaReport {
    Point x0{0.0, 0.0};
    std::vector<int> levels;
    std::vector<std::string> probes;
    std::vector<std::vector<double>> errors;  // [probe][level]
    std::size_t max_terms_per_level = 0;      // nonzero translates per (beta, j)
    std::vector<double> slopes;               // per probe: fitted slope of log error over J
    bool monotone = false;                    // downward trend on every probe
    bool strictly_monotone = false;
    double final_max = 0.0;
};

// coefficients 2^{jn} k^beta(2^j x0 - m), partial sums synthesized with Phi
CoefficientTensor delta_coefficients(const Point& x0, const QuarkSystem& sys, int beta_max, int j_max);
std::vector<DeltaProbe> default_delta_probes(const Point& x0, int n);
DeltaReport delta_expansion_demo(const Point& x0, const QuarkSystem& sys, const std::vector<DeltaProbe>& probes,
                                 int J_first = 2, int J_last = 6);

} // namespace qf
