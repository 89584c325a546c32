#pragma once

#include <optional>
#include <vector>

#include "qf/quark_system.hpp"
#include "qf/sequence_norms.hpp"

namespace qf {

enum class Regime { Positive, Negative };

struct TruncationConfig {
    int beta_max = 4;
    int j_max = 6;
    Regime regime = Regime::Positive;
    int j_min = 0;  // first level; the F-branch dual sits at j_min
};

// positive regime: lambda = 2^{jn} (f, Phi_{j,m}); negative regime: lambda = 2^{jn} (f, k_{j,m})
CoefficientTensor analyze(const ComplexField& f, const QuarkSystem& sys, const TruncationConfig& cfg);
// real input yields real coefficients (imaginary round-off checked and dropped)
CoefficientTensor analyze(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg);

// coefficients of one (beta, j) slab in the positive regime from a precomputed spectrum of f
Slab positive_slab(const FrequencyField& F, const QuarkSystem& sys, const MultiIndex& beta, int j, Branch br);

// positive regime sums lambda k, negative regime sums lambda Phi
ComplexField synthesize(const CoefficientTensor& lambda, const QuarkSystem& sys, const TruncationConfig& cfg);

enum class ResidualNorm { L2, Sup };

double round_trip_residual(const RealField& f, const QuarkSystem& sys, const TruncationConfig& cfg,
                           ResidualNorm norm = ResidualNorm::L2);

// admissible regime for a spec; throws HypothesisViolated between the two ranges
Regime regime_for(const SpaceSpec& spec, int n);

SequenceSpec sequence_spec_for(const SpaceSpec& spec, const GridSpec& g);

struct RatioRow {
    std::size_t id = 0;
    double sequence = 0.0;
    double reference = 0.0;
    double ratio = 0.0;
};

struct RatioReport {
    SpaceSpec spec;
    Regime regime = Regime::Positive;
    std::vector<RatioRow> rows;
    double min = 0.0;
    double max = 0.0;
    double spread = 0.0;
};

RatioReport summarize_ratios(std::vector<RatioRow> rows, const SpaceSpec& spec, Regime regime);

RatioReport frame_ratio_report(const std::vector<RealField>& corpus, const SpaceSpec& spec, const QuarkSystem& sys,
                               TruncationConfig cfg, const ResolutionOfUnity& res);

// t^{-n} int k((y - x)/t) f(y) dy by periodic grid quadrature
cplx local_mean_continuous(const ComplexField& f, const QuarkTemplate& k, double t, const Point& x);
cplx local_mean_continuous(const RealField& f, const QuarkTemplate& k, double t, const Point& x);

// beta = 0 slice of the negative-regime analysis measured in the quark sequence norm
double single_beta_norm(const RealField& f, const QuarkSystem& sys, const SpaceSpec& spec, int j_max);

struct LiftReport {
    double sequence = 0.0;       // max over |alpha| <= N of the negative-regime quark norm of D^alpha f at s - N
    double reference = 0.0;      // max over |alpha| <= N of the reference norm of D^alpha f at s - N
    MultiIndex alpha_argmax;
};

LiftReport derivative_lift_norm(const RealField& f, const SpaceSpec& spec, int N, const QuarkSystem& sys,
                                const ResolutionOfUnity& res, int j_max);

} // namespace qf
