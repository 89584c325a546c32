#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qf/error.hpp"

namespace qf {

using cplx = std::complex<double>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using Point = std::array<double, 2>;
using Lattice = std::array<long, 2>;

inline constexpr double pi = 3.14159265358979323846;

// Multi-index with n in {1,2}; for n = 1 the second slot stays zero.
struct MultiIndex {
    std::array<int, 2> c{0, 0};
    int n = 1;

    int order() const { return c[0] + (n == 2 ? c[1] : 0); }
    long factorial() const;
    bool operator==(const MultiIndex&) const = default;
};

// graded lexicographic: by |beta|, then lexicographically descending in the first slot
bool graded_less(const MultiIndex& a, const MultiIndex& b);
std::vector<MultiIndex> enumerate_multi_indices(int n, int order_max);

struct GridSpec {
    int n = 1;
    int N = 4096;
    double L = 64.0;

    static GridSpec make(int n, int N, double L);
    static GridSpec standard(int n);

    double h() const { return L / N; }
    Eigen::Index size() const { return n == 1 ? Eigen::Index(N) : Eigen::Index(N) * N; }
    double coord(int i) const { return -0.5 * L + i * h(); }
    int signed_freq(int k) const { return k < N / 2 ? k : k - N; }
    double freq(int k) const { return 2.0 * pi / L * signed_freq(k); }
    // largest j with 2^{j+1} * 3/2 below Nyquist
    int max_level() const;

    Point point(Eigen::Index flat) const;
    Eigen::Index flat(int i0, int i1 = 0) const { return n == 1 ? i0 : Eigen::Index(i0) * N + i1; }
    std::array<int, 2> index(Eigen::Index flat) const;

    bool operator==(const GridSpec&) const = default;
};

template <class S>
class SampledField {
public:
    using Scalar = S;

    SampledField() = default;
    explicit SampledField(const GridSpec& g) : grid_(g), values_(Vec<S>::Zero(g.size())) {}
    SampledField(const GridSpec& g, Vec<S> v) : grid_(g), values_(std::move(v))
    {
        require(values_.size() == grid_.size(), ErrorKind::GridMismatch, "field length does not match grid");
    }

    template <class Fn>
    static SampledField sample(const GridSpec& g, Fn&& fn)
    {
        SampledField f(g);
        for (Eigen::Index i = 0; i < g.size(); ++i) f.values_[i] = static_cast<S>(fn(g.point(i)));
        return f;
    }

    const GridSpec& grid() const { return grid_; }
    Vec<S>& values() { return values_; }
    const Vec<S>& values() const { return values_; }
    S& operator[](Eigen::Index i) { return values_[i]; }
    const S& operator[](Eigen::Index i) const { return values_[i]; }

    SampledField& operator+=(const SampledField& o)
    {
        check_same(o);
        values_ += o.values_;
        return *this;
    }
    SampledField& operator-=(const SampledField& o)
    {
        check_same(o);
        values_ -= o.values_;
        return *this;
    }
    SampledField& operator*=(S a)
    {
        values_ *= a;
        return *this;
    }

    void check_same(const SampledField& o) const
    {
        require(grid_ == o.grid_, ErrorKind::GridMismatch, "fields live on different grids");
    }

private:
    GridSpec grid_{};
    Vec<S> values_{};
};

using RealField = SampledField<double>;
using ComplexField = SampledField<cplx>;

template <class S>
SampledField<S> operator+(SampledField<S> a, const SampledField<S>& b) { return a += b; }
template <class S>
SampledField<S> operator-(SampledField<S> a, const SampledField<S>& b) { return a -= b; }
template <class S>
SampledField<S> operator*(S s, SampledField<S> a) { return a *= s; }

// Samples of f^ at the grid frequencies 2*pi/L * k, FFT order per axis.
struct FrequencyField {
    GridSpec grid;
    Vec<cplx> coeff;
};

// In-place unnormalized multi-dimensional FFT on a grid-shaped buffer.
void fft_grid(Vec<cplx>& data, const GridSpec& g, bool inverse);

FrequencyField dft_forward(const ComplexField& f);
FrequencyField dft_forward(const RealField& f);
ComplexField dft_inverse(const FrequencyField& F);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
// max |Im| / max |value|, 0 for the zero field
double imag_ratio(const ComplexField& f);
// real view of a field flagged real; ComplexField error above 1e-12 relative imaginary part
RealField require_real(const ComplexField& f, double tol = 1e-12);

template <class S>
S quadrature_integral(const SampledField<S>& f)
{
    return f.values().sum() * std::pow(f.grid().h(), f.grid().n);
}

// bilinear distribution pairing, no conjugation
template <class S>
S pairing(const SampledField<S>& f, const SampledField<S>& g)
{
    f.check_same(g);
    return f.values().cwiseProduct(g.values()).sum() * std::pow(f.grid().h(), f.grid().n);
}

template <class S>
double lp_norm(const SampledField<S>& f, double p)
{
    const Vec<double> a = f.values().cwiseAbs();
    if (std::isinf(p)) return a.size() ? a.maxCoeff() : 0.0;
    const double w = std::pow(f.grid().h(), f.grid().n);
    return std::pow(a.array().pow(p).sum() * w, 1.0 / p);
}

template <class S>
double sup_norm(const SampledField<S>& f) { return f.values().size() ? f.values().cwiseAbs().maxCoeff() : 0.0; }

// g(2^j x - m) on the grid; exact lookup on nodes, trigonometric interpolation between them
RealField dilate_translate_sample(const RealField& tmpl, int j, const Point& m);
ComplexField dilate_translate_sample(const ComplexField& tmpl, int j, const Point& m);

ComplexField spectral_derivative(const ComplexField& f, const MultiIndex& alpha);
RealField spectral_derivative(const RealField& f, const MultiIndex& alpha);

// f(x - a) by a Fourier phase
ComplexField translate_field(const ComplexField& f, const Point& a);
RealField translate_field(const RealField& f, const Point& a);

void write_qfld(const std::string& path, const ComplexField& f);
ComplexField read_qfld(const std::string& path);
void write_csv(const std::string& path, const ComplexField& f);

// FNV-1a over the raw little-endian payload
std::uint64_t checksum(const ComplexField& f);
std::uint64_t checksum(const RealField& f);
std::string hex64(std::uint64_t v);

} // namespace qf
