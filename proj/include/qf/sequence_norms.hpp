#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qf/grid.hpp"
#include "qf/littlewood_paley.hpp"

namespace qf {

enum class Indexing { Quark, Wavelet };

// dense window of coefficients for one (beta, j); beta holds the gender for wavelet indexing (0 = F, 1 = M)
struct Slab {
    MultiIndex beta;
    int j = 0;
    Lattice lo{0, 0};
    Lattice extent{1, 1};
    Vec<cplx> v;

    bool contains(const Lattice& m) const;
    Eigen::Index offset(const Lattice& m) const;
    Lattice lattice(Eigen::Index offset) const;
};

class CoefficientTensor {
public:
    explicit CoefficientTensor(int n = 1, Indexing idx = Indexing::Quark) : n_(n), indexing_(idx) {}

    int n() const { return n_; }
    Indexing indexing() const { return indexing_; }

    // get or create the slab; an existing slab is grown to cover the requested window
    Slab& slab(const MultiIndex& beta, int j, const Lattice& lo, const Lattice& extent);
    const Slab* find(const MultiIndex& beta, int j) const;
    const std::vector<Slab>& slabs() const { return slabs_; }
    std::vector<Slab>& slabs() { return slabs_; }

    void set(const MultiIndex& beta, int j, const Lattice& m, cplx value);
    void add(const MultiIndex& beta, int j, const Lattice& m, cplx value);
    cplx get(const MultiIndex& beta, int j, const Lattice& m) const;

    std::size_t nonzeros() const;
    double max_abs() const;
    std::vector<MultiIndex> stored_betas() const;

    // visits nonzero entries in (beta graded-lex, j ascending, m row-major) order
    void for_each(const std::function<void(const MultiIndex&, int, const Lattice&, cplx)>& fn) const;

    CoefficientTensor& operator*=(cplx a);
    // entrywise a*this + b*o over the union of windows
    CoefficientTensor combine(cplx a, const CoefficientTensor& o, cplx b) const;

    nlohmann::json meta = nlohmann::json::object();

private:
    int n_;
    Indexing indexing_;
    std::vector<Slab> slabs_;

    std::vector<Slab>::iterator locate(const MultiIndex& beta, int j);
};

inline double drop_tiny(double x) { return std::abs(x) < 1e-300 ? 0.0 : x; }
inline cplx drop_tiny(cplx z) { return std::abs(z) < 1e-300 ? cplx(0.0) : z; }

enum class Flavor { Plain, Quark, WeightedQuark, Wavelet, Domain };

// restriction data for the domain flavor
struct DomainIndexing {
    std::function<bool(int, const Lattice&)> contains;
    std::vector<char> mask;  // grid points inside Omega
};

struct SequenceSpec {
    SpaceSpec space;
    Flavor flavor = Flavor::Quark;
    GridSpec grid = GridSpec::standard(1);
    std::optional<double> beta_r;  // l_r over beta instead of the sup
    std::shared_ptr<const DomainIndexing> domain;
};

struct SequenceNormReport {
    double value = 0.0;
    MultiIndex beta_argmax;
    std::vector<std::pair<MultiIndex, double>> per_beta;
};

SequenceNormReport sequence_norm_report(const CoefficientTensor& lambda, const SequenceSpec& spec);
double sequence_norm(const CoefficientTensor& lambda, const SequenceSpec& spec);

struct SplitTensors {
    CoefficientTensor plus;
    CoefficientTensor minus;
};

SplitTensors positivity_split(const CoefficientTensor& lambda);

// drop imaginary parts after checking they are round-off relative to the tensor's scale
void project_real(CoefficientTensor& lambda, double tol = 1e-10);

void write_jsonl(std::ostream& os, const CoefficientTensor& t);
void write_jsonl(const std::string& path, const CoefficientTensor& t);
CoefficientTensor read_jsonl(std::istream& is, int n);
CoefficientTensor read_jsonl(const std::string& path, int n);

} // namespace qf
