#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qf/grid.hpp"
#include "qf/littlewood_paley.hpp"

namespace qf {

// One smooth component w * B((t - lo)/(hi - lo)) with B(u) = exp(-1/(u(1-u))) on (0,1).
struct BumpComponent {
    double lo = 0.05;
    double hi = 1.9;
    double weight = 1.0;
};

struct BumpProfile {
    std::string id = "concentrated";
    std::vector<BumpComponent> parts{{0.05, 1.15, 1.0}, {0.05, 1.9, 1e-3}};

    double support_lo() const;
    double support_hi() const;
    double raw(double t) const;
    // integer-shift normalized profile k_1 = b / sum_m b(. - m)
    double normalized(double t) const;
};

BumpProfile default_bump();
// widened single-component bump on (0.05, 0.05 + width)
BumpProfile wide_bump(double width);

struct QuarkTemplate {
    GridSpec grid;
    BumpProfile profile;
    int J = 1;
    double eps = 0.0;
    double support_radius = 0.0;
    RealField k;

    // (2^-J t)^b k_1(t)
    double axis(double t, int b) const;
    double eval(const Point& y, const MultiIndex& beta) const;
};

QuarkTemplate build_base_bump(const GridSpec& g, const BumpProfile& profile = default_bump());
// flattened variant: sup |grad k| <= slope_bound
QuarkTemplate build_small_slope_bump(const GridSpec& g, double slope_bound = 0.5);

// max |sum_m k(x - m) - 1| over the grid
double partition_defect(const QuarkTemplate& t);
// sup |d/dt k_1| on a dense sampling
double bump_slope(const BumpProfile& p);

enum class Branch { F, M };

struct OmegaAxis {
    int order = 0;
    int M_max = 0;
    std::vector<cplx> coeff;  // index m + M_max
    double shell_ratio = 0.0;

    cplx eval(double eta) const;
};

// lattice coefficients (omega^b)^vee(m), |m| <= M_max, for one axis
OmegaAxis build_omega_axis(int order, int J, int n, int M_max, int samples = 8192);
double omega_profile(double x);

struct DualTemplate {
    GridSpec grid;
    MultiIndex beta;
    RealField phi_F;
    RealField phi_M;
    int omega_truncation = 0;
    double imag_F = 0.0;
    double imag_M = 0.0;
    double low_band_leak = 0.0;
};

struct SystemConfig {
    int beta_max = 4;
    int j_max = -1;
    int M_max = 384;
    double kappa = 0.0;
    BumpProfile profile = default_bump();
    bool small_slope = false;
    double slope_bound = 0.5;
};

enum class DualMode { Periodic, Strict };

// one periodically wrapped 1-D quark profile at level j, translate m
struct AxisQuark {
    long m = 0;
    long start = 0;  // unwrapped grid index of the first sample
    std::vector<double> v;
};

class QuarkSystem {
public:
    static QuarkSystem build(const GridSpec& g, const SystemConfig& cfg = {});

    const GridSpec& grid() const { return quark_.grid; }
    int n() const { return quark_.grid.n; }
    const QuarkTemplate& quark() const { return quark_; }
    const SystemConfig& config() const { return cfg_; }
    int beta_max() const { return cfg_.beta_max; }
    int j_max() const { return j_max_; }
    double kappa() const { return cfg_.kappa; }
    const std::vector<MultiIndex>& betas() const { return betas_; }
    const DualTemplate& dual(const MultiIndex& beta) const;
    const std::vector<DualTemplate>& duals() const { return duals_; }
    const OmegaAxis& omega(int order) const { return omega_[std::size_t(order)]; }
    double shell_ratio() const { return shell_ratio_; }
    double tail_radius() const { return tail_radius_; }

    // phi(xi/2^j) Omega^beta(xi/2^j) on the grid; branch F uses phi_0, M uses phi^0
    Vec<cplx> analysis_symbol(const MultiIndex& beta, int j, Branch br) const;
    // Fourier transform of x -> Phi^beta(2^j x): 2^{-jn} phi(xi/2^j) Omega^beta(-xi/2^j)
    Vec<cplx> template_spectrum(const MultiIndex& beta, int j, Branch br) const;

    RealField quark_eval(const MultiIndex& beta, int j, const Lattice& m) const;
    RealField dual_eval(const MultiIndex& beta, int j, const Lattice& m, DualMode mode = DualMode::Periodic) const;

    // translates whose anchor 2^-j m lies in the box, one per axis
    std::pair<long, long> m_window(int j) const;
    std::vector<AxisQuark> axis_quarks(int order, int j) const;

    nlohmann::json manifest() const;

private:
    QuarkTemplate quark_;
    SystemConfig cfg_;
    int j_max_ = 0;
    std::vector<MultiIndex> betas_;
    std::vector<OmegaAxis> omega_;
    // Omega_b(xi_k / 2^j) on the grid frequencies, zero outside the cutoff band
    std::vector<std::vector<Vec<cplx>>> omega_table_;
    std::vector<DualTemplate> duals_;
    double shell_ratio_ = 0.0;
    double tail_radius_ = 0.0;

    std::size_t beta_slot(const MultiIndex& beta) const;
    Vec<cplx> axis_symbol(int order, int j, Branch br, bool negate) const;
};

struct MomentRow {
    MultiIndex beta;
    MultiIndex gamma;
    double moment = 0.0;
    double bound = 0.0;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    double worst_ratio = 0.0;  // max |moment| / bound
    bool pass = false;
};

// moments of Phi^beta_M up to order gamma_max on a wide coarse grid
MomentReport verify_moments(const QuarkSystem& sys, int gamma_max = 4);

struct DecayRow {
    MultiIndex beta;
    double log2_sup = 0.0;  // log2 sup |Phi^beta_M| (1+|x|)^N
};

struct DecayReport {
    int N = 6;
    std::vector<DecayRow> rows;
    std::vector<double> kappas;
    std::vector<double> slope_1_4;      // per kappa: fitted slope of log2 C over |beta| in {1..4}
    std::vector<double> slope_2_max;    // per kappa: over |beta| in {2..beta_max}
    std::vector<double> quark_slope;    // quark-side check at kappa = eps/2, |alpha| <= 2
    bool pass = false;
};

DecayReport verify_decay(const QuarkSystem& sys, const std::vector<double>& kappas, int N = 6);

// wide 1-D sampling of the per-axis factor of Phi (branch F: phi_0 Omega_b, M-part: phi_0(2.) Omega_b)
struct AxisProfile {
    GridSpec grid;
    Vec<double> A;
    Vec<double> B;
};
AxisProfile wide_axis_profile(const QuarkSystem& sys, int order);

} // namespace qf
