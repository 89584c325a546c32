#pragma once

#include <vector>

#include "qf/grid.hpp"
#include "qf/littlewood_paley.hpp"
#include "qf/sequence_norms.hpp"

namespace qf {

struct WaveletPair {
    int u = 3;                    // vanishing moments; filter length 2u
    std::vector<double> h;        // low-pass refinement coefficients, sum sqrt(2)
    std::vector<double> g;        // g_k = (-1)^k h_{2u-1-k}
    int R = 12;                   // table resolution 2^-R
    std::vector<double> phi;      // scaling function at k 2^-R on [0, 2u-1]
    std::vector<double> psi;      // wavelet at k 2^-R on [0, 2u-1]
    double eigen_residual = 0.0;
    RealField psi_F;              // sampled on the working grid at the origin
    RealField psi_M;

    double support() const { return double(2 * u - 1); }
    // table lookup, linear between table nodes, zero off the support
    double eval(double t, bool mother) const;
};

WaveletPair build_wavelet_pair(int u, const GridSpec& g, int R = 12);

// Fourier transforms of the scaling function and the wavelet, (2pi)^{-1/2} normalization
cplx phi_hat(const WaveletPair& w, double xi);
cplx psi_hat(const WaveletPair& w, double xi);

// gender index c[l] = 0 for F, 1 for M
std::vector<MultiIndex> genders(int n, int j);

CoefficientTensor wavelet_analyze(const RealField& f, const WaveletPair& w, int j_max);
ComplexField wavelet_synthesize(const CoefficientTensor& lambda, const WaveletPair& w);

struct WaveletInvariants {
    std::vector<double> moments;  // int psi x^v for v < u
    double norm_F = 0.0;
    double norm_M = 0.0;
    double shift_overlap = 0.0;   // <phi, phi(. - 1)>
    double support_length = 0.0;
};

WaveletInvariants wavelet_invariants(const WaveletPair& w);

// largest off-diagonal and diagonal defect of the Gram matrix of 2^{jn/2} psi^j_{G,m}, j <= 1, |m| <= patch
struct GramReport {
    double max_offdiag = 0.0;
    double max_diag_defect = 0.0;
    std::size_t size = 0;
};

GramReport wavelet_gram(const WaveletPair& w, int n, int patch = 2);

// true when u > max(s, sigma_p - s) fails for the given space
bool wavelet_order_insufficient(int u, const SpaceSpec& spec, int n);

} // namespace qf
