#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "qf/frame_transform.hpp"
#include "qf/quark_system.hpp"
#include "qf/sequence_norms.hpp"

namespace qf {

struct Box {
    Point lo{0.0, 0.0};
    Point hi{0.0, 0.0};
};

// Euclidean distance between closed boxes (0 when they meet)
double box_distance(const Box& a, const Box& b, int n);

class DomainSpec {
public:
    static DomainSpec intervals(std::vector<std::pair<double, double>> parts);
    // closed rectilinear polygon, vertices in order, consecutive vertices share a coordinate
    static DomainSpec polygon(std::vector<Point> vertices);
    static DomainSpec square(double lo, double hi);
    // [lo,hi]^2 minus the upper-right quadrant
    static DomainSpec l_shape(double lo, double hi);
    static DomainSpec from_json(int n, const std::string& kind, const nlohmann::json& params);

    int n() const { return n_; }
    bool contains(const Point& x) const;
    double boundary_distance(const Point& x) const;
    double boundary_distance(const Box& b) const;
    // closed box inside the closure of the domain
    bool box_inside(const Box& b) const;
    Box bounds() const;
    const std::vector<Box>& boundary() const { return gamma_; }
    std::vector<char> mask(const GridSpec& g) const;
    nlohmann::json to_json() const;

private:
    int n_ = 1;
    std::vector<std::pair<double, double>> parts_;
    std::vector<Point> vertices_;
    std::vector<Box> gamma_;  // boundary pieces as degenerate boxes
    void validate() const;
};

struct WhitneyCube {
    int J = 0;
    Lattice M{0, 0};
    Box box(int n) const;
    bool operator==(const WhitneyCube&) const = default;
};

struct WhitneyCover {
    int n = 1;
    int K = 2;
    int J_max = 6;
    std::vector<WhitneyCube> cubes;
    double uncovered_measure = 0.0;  // grid measure of Omega outside the cubes

    nlohmann::json to_json(const DomainSpec& omega) const;
};

WhitneyCover whitney_decompose(const DomainSpec& omega, int K, int J_max, const GridSpec& g);

struct PartitionPiece {
    std::array<long, 2> lo{0, 0};  // first grid index per axis (unwrapped)
    std::array<long, 2> extent{1, 1};
    Vec<double> v;
};

struct DomainPartition {
    GridSpec grid;
    WhitneyCover cover;
    double dilation = 1.5;  // bump support is dilation * Q
    std::vector<PartitionPiece> pieces;

    RealField piece(std::size_t i) const;
    // sum of all pieces on the grid
    RealField total() const;
};

// rho = b / sum b with b the exp(-1/(1-u^2)) tensor bump on dilation * Q
DomainPartition build_domain_partition(const WhitneyCover& cover, const DomainSpec& omega, const GridSpec& g,
                                       double dilation = 1.5);

struct PartitionConstants {
    std::vector<int> levels;
    std::vector<std::array<double, 3>> c;  // per level: sup |D^gamma rho| 2^{-J|gamma|}, |gamma| = 0, 1, 2
};

PartitionConstants partition_constants(const DomainPartition& part, int samples_per_axis = 48);

double rloc_norm(const RealField& f, const SpaceSpec& spec, const DomainPartition& part, const ResolutionOfUnity& res);

struct DomainIndex {
    int j = 0;
    Lattice m{0, 0};
    auto operator<=>(const DomainIndex&) const = default;
};

// (j, m) with Q_{j,m} inside an accepted cube, j <= j_max
std::vector<DomainIndex> domain_index_set(const WhitneyCover& cover, int j_max);

// sequence-norm restriction to the domain indices and grid points of Omega
std::shared_ptr<const DomainIndexing> domain_indexing(const WhitneyCover& cover, const DomainSpec& omega,
                                                      const GridSpec& g, int j_max);

// support of k^beta_{j,m} inside (1+2K) Q_{J,M} for some cube with J <= j and inside the closure of Omega
bool quark_hosted(const QuarkSystem& sys, const WhitneyCover& cover, const DomainSpec& omega, int j, const Lattice& m);

CoefficientTensor domain_analyze(const RealField& f, const QuarkSystem& sys, const DomainPartition& part,
                                 const DomainSpec& omega, int beta_max, int j_max);
ComplexField domain_synthesize(const CoefficientTensor& lambda, const QuarkSystem& sys, const WhitneyCover& cover,
                               const DomainSpec& omega);

// || delta^{-s} f | L_p(Omega) || with delta = min(dist(., boundary), 1)
double distance_weighted_lp(const RealField& f, const DomainSpec& omega, double s, double p);

struct LocalizationRow {
    double reference = 0.0;
    double localized = 0.0;
    double ratio = 0.0;
};

struct LocalizationReport {
    std::vector<LocalizationRow> rows;
    double spread = 0.0;
};

// unit-lattice partition psi_M on the box
DomainPartition unit_lattice_partition(const GridSpec& g);
LocalizationReport localization_check(const std::vector<RealField>& corpus, const SpaceSpec& spec,
                                      const ResolutionOfUnity& res);

} // namespace qf
