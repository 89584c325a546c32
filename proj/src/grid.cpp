#include "qf/grid.hpp"

#include <cstdio>

#include <algorithm>
#include <bit>
#include <functional>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <unsupported/Eigen/FFT>

namespace qf {

long MultiIndex::factorial() const
{
    long r = 1;
    for (int i = 0; i < n; ++i)
        for (int k = 2; k <= c[i]; ++k) r *= k;
    return r;
}

bool graded_less(const MultiIndex& a, const MultiIndex& b)
{
    if (a.order() != b.order()) return a.order() < b.order();
    return a.c[0] > b.c[0];
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int order_max)
{
    std::vector<MultiIndex> out;
    for (int k = 0; k <= order_max; ++k) {
        if (n == 1) {
            out.push_back(MultiIndex{{k, 0}, 1});
        } else {
            for (int a = k; a >= 0; --a) out.push_back(MultiIndex{{a, k - a}, 2});
        }
    }
    return out;
}

GridSpec GridSpec::make(int n, int N, double L)
{
    require(n == 1 || n == 2, ErrorKind::SpecInvalid, "dimension must be 1 or 2");
    require(N >= 64 && std::has_single_bit(static_cast<unsigned>(N)), ErrorKind::SpecInvalid,
            "points per axis must be a power of two >= 64");
    require(L > 0.0, ErrorKind::SpecInvalid, "box width must be positive");
    return GridSpec{n, N, L};
}

GridSpec GridSpec::standard(int n)
{
    return n == 1 ? make(1, 4096, 64.0) : make(2, 512, 32.0);
}

int GridSpec::max_level() const
{
    const double nyq = pi / h();
    int j = -1;
    while (std::ldexp(1.5, j + 2) < nyq) ++j;
    return j;
}

Point GridSpec::point(Eigen::Index flat) const
{
    if (n == 1) return {coord(int(flat)), 0.0};
    return {coord(int(flat / N)), coord(int(flat % N))};
}

std::array<int, 2> GridSpec::index(Eigen::Index flat) const
{
    if (n == 1) return {int(flat), 0};
    return {int(flat / N), int(flat % N)};
}

namespace {

Eigen::FFT<double>& fft_engine()
{
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> e;
        e.SetFlag(Eigen::FFT<double>::Unscaled);
        return e;
    }();
    return engine;
}

void fft_line(std::vector<cplx>& buf, std::vector<cplx>& out, bool inverse)
{
    auto& e = fft_engine();
    if (inverse)
        e.inv(out, buf);
    else
        e.fwd(out, buf);
}

// (-1)^{kappa} for the signed frequency of FFT index k
inline double parity(const GridSpec& g, int k) { return (g.signed_freq(k) & 1) ? -1.0 : 1.0; }

void apply_parity(Vec<cplx>& d, const GridSpec& g)
{
    if (g.n == 1) {
        for (int k = 0; k < g.N; ++k) d[k] *= parity(g, k);
        return;
    }
    for (int a = 0; a < g.N; ++a)
        for (int b = 0; b < g.N; ++b) d[Eigen::Index(a) * g.N + b] *= parity(g, a) * parity(g, b);
}

} // namespace

void fft_grid(Vec<cplx>& data, const GridSpec& g, bool inverse)
{
    const int N = g.N;
    std::vector<cplx> buf(N), out(N);
    if (g.n == 1) {
        std::copy(data.data(), data.data() + N, buf.begin());
        fft_line(buf, out, inverse);
        std::copy(out.begin(), out.end(), data.data());
        return;
    }
    for (int r = 0; r < N; ++r) {
        cplx* row = data.data() + Eigen::Index(r) * N;
        std::copy(row, row + N, buf.begin());
        fft_line(buf, out, inverse);
        std::copy(out.begin(), out.end(), row);
    }
    for (int c = 0; c < N; ++c) {
        for (int r = 0; r < N; ++r) buf[r] = data[Eigen::Index(r) * N + c];
        fft_line(buf, out, inverse);
        for (int r = 0; r < N; ++r) data[Eigen::Index(r) * N + c] = out[r];
    }
}

FrequencyField dft_forward(const ComplexField& f)
{
    const GridSpec& g = f.grid();
    Vec<cplx> d = f.values();
    fft_grid(d, g, false);
    apply_parity(d, g);
    d *= std::pow(g.h() / std::sqrt(2.0 * pi), g.n);
    return {g, std::move(d)};
}

FrequencyField dft_forward(const RealField& f) { return dft_forward(to_complex(f)); }

ComplexField dft_inverse(const FrequencyField& F)
{
    const GridSpec& g = F.grid;
    Vec<cplx> d = F.coeff;
    apply_parity(d, g);
    fft_grid(d, g, true);
    d *= std::pow(std::sqrt(2.0 * pi) / g.L, g.n);
    return ComplexField(g, std::move(d));
}

ComplexField to_complex(const RealField& f) { return ComplexField(f.grid(), f.values().cast<cplx>()); }

RealField real_part(const ComplexField& f) { return RealField(f.grid(), f.values().real()); }

double imag_ratio(const ComplexField& f)
{
    const double mx = sup_norm(f);
    if (mx == 0.0) return 0.0;
    return f.values().imag().cwiseAbs().maxCoeff() / mx;
}

RealField require_real(const ComplexField& f, double tol)
{
    require(imag_ratio(f) <= tol, ErrorKind::ComplexField, "field flagged real has a significant imaginary part");
    return real_part(f);
}

namespace {

template <class S>
SampledField<S> dilate_translate_impl(const SampledField<S>& t, int j, const Point& m)
{
    const GridSpec& g = t.grid();
    const double h = g.h();
    const double s = std::ldexp(1.0, j);
    if (j == 0 && m[0] == 0.0 && m[1] == 0.0) return t;

    // support of the template mapped by y -> 2^{-j}(y + m) has to stay in the box
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (t[i] == S(0)) continue;
        const Point y = g.point(i);
        for (int a = 0; a < g.n; ++a) {
            const double x = (y[a] + m[a]) / s;
            require(x >= -0.5 * g.L && x < 0.5 * g.L, ErrorKind::SupportOverflow,
                    "dilated translate leaves the box");
        }
    }

    SampledField<S> out(g);
    FrequencyField F;
    bool have_spectrum = false;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        Point y{};
        std::array<double, 2> u{};
        bool on_node = true;
        bool inside = true;
        for (int a = 0; a < g.n; ++a) {
            y[a] = s * x[a] - m[a];
            u[a] = (y[a] + 0.5 * g.L) / h;
            if (std::abs(u[a] - std::round(u[a])) > 1e-9) on_node = false;
            if (y[a] < -0.5 * g.L - h || y[a] >= 0.5 * g.L) inside = false;
        }
        if (!inside) continue;
        if (on_node) {
            const int r0 = int(std::lround(u[0]));
            const int r1 = g.n == 2 ? int(std::lround(u[1])) : 0;
            if (r0 < 0 || r0 >= g.N || r1 < 0 || r1 >= g.N) continue;
            out[i] = t[g.flat(r0, r1)];
            continue;
        }
        if (!have_spectrum) {
            F = dft_forward(t);
            have_spectrum = true;
        }
        // band-limited interpolation: inverse transform evaluated off the grid
        const double c = std::pow(std::sqrt(2.0 * pi) / g.L, g.n);
        cplx acc = 0.0;
        if (g.n == 1) {
            for (int k = 0; k < g.N; ++k) acc += F.coeff[k] * std::polar(1.0, g.freq(k) * y[0]);
        } else {
            for (int k0 = 0; k0 < g.N; ++k0) {
                cplx row = 0.0;
                for (int k1 = 0; k1 < g.N; ++k1)
                    row += F.coeff[Eigen::Index(k0) * g.N + k1] * std::polar(1.0, g.freq(k1) * y[1]);
                acc += row * std::polar(1.0, g.freq(k0) * y[0]);
            }
        }
        if constexpr (std::is_same_v<S, double>)
            out[i] = (c * acc).real();
        else
            out[i] = c * acc;
    }
    return out;
}

FrequencyField multiply_symbol(FrequencyField F, const std::function<cplx(double, double)>& sym)
{
    const GridSpec& g = F.grid;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = g.index(i);
        F.coeff[i] *= sym(g.freq(k[0]), g.n == 2 ? g.freq(k[1]) : 0.0);
    }
    return F;
}

cplx derivative_symbol(const MultiIndex& alpha, double x0, double x1)
{
    cplx r = 1.0;
    for (int k = 0; k < alpha.c[0]; ++k) r *= cplx(0.0, x0);
    for (int k = 0; k < alpha.c[1]; ++k) r *= cplx(0.0, x1);
    return r;
}

} // namespace

RealField dilate_translate_sample(const RealField& tmpl, int j, const Point& m)
{
    return dilate_translate_impl(tmpl, j, m);
}

ComplexField dilate_translate_sample(const ComplexField& tmpl, int j, const Point& m)
{
    return dilate_translate_impl(tmpl, j, m);
}

ComplexField spectral_derivative(const ComplexField& f, const MultiIndex& alpha)
{
    if (alpha.order() == 0) return f;
    return dft_inverse(multiply_symbol(dft_forward(f), [&](double a, double b) {
        return derivative_symbol(alpha, a, b);
    }));
}

RealField spectral_derivative(const RealField& f, const MultiIndex& alpha)
{
    if (alpha.order() == 0) return f;
    return real_part(spectral_derivative(to_complex(f), alpha));
}

ComplexField translate_field(const ComplexField& f, const Point& a)
{
    return dft_inverse(multiply_symbol(dft_forward(f), [&](double x0, double x1) {
        return std::polar(1.0, -(x0 * a[0] + x1 * a[1]));
    }));
}

RealField translate_field(const RealField& f, const Point& a) { return real_part(translate_field(to_complex(f), a)); }

namespace {

template <class T>
void put_le(std::ostream& os, T v)
{
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get_le(std::istream& is)
{
    unsigned char b[sizeof(T)];
    is.read(reinterpret_cast<char*>(b), sizeof(T));
    require(bool(is), ErrorKind::Io, "truncated QFLD stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}

constexpr std::uint32_t qfld_version = 1;

} // namespace

void write_qfld(const std::string& path, const ComplexField& f)
{
    std::ofstream os(path, std::ios::binary);
    require(bool(os), ErrorKind::Io, "cannot open " + path);
    os.write("QFLD", 4);
    put_le<std::uint32_t>(os, qfld_version);
    put_le<std::uint32_t>(os, std::uint32_t(f.grid().n));
    put_le<std::uint32_t>(os, std::uint32_t(f.grid().N));
    put_le<double>(os, f.grid().L);
    for (Eigen::Index i = 0; i < f.values().size(); ++i) {
        put_le<double>(os, f[i].real());
        put_le<double>(os, f[i].imag());
    }
    require(bool(os), ErrorKind::Io, "write failed: " + path);
}

ComplexField read_qfld(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    require(bool(is), ErrorKind::Io, "cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    require(bool(is) && std::memcmp(magic, "QFLD", 4) == 0, ErrorKind::Io, "not a QFLD file: " + path);
    require(get_le<std::uint32_t>(is) == qfld_version, ErrorKind::Io, "unsupported QFLD version");
    const int n = int(get_le<std::uint32_t>(is));
    const int N = int(get_le<std::uint32_t>(is));
    const double L = get_le<double>(is);
    ComplexField f(GridSpec::make(n, N, L));
    for (Eigen::Index i = 0; i < f.values().size(); ++i) {
        const double re = get_le<double>(is);
        const double im = get_le<double>(is);
        f[i] = cplx(re, im);
    }
    return f;
}

void write_csv(const std::string& path, const ComplexField& f)
{
    std::ofstream os(path);
    require(bool(os), ErrorKind::Io, "cannot open " + path);
    const GridSpec& g = f.grid();
    os << (g.n == 1 ? "i0,re,im\n" : "i0,i1,re,im\n");
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const auto k = g.index(i);
        os << k[0] << ',';
        if (g.n == 2) os << k[1] << ',';
        os << f[i].real() << ',' << f[i].imag() << '\n';
    }
}

namespace {

std::uint64_t fnv_bytes(std::uint64_t h, const void* p, std::size_t len)
{
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::uint64_t checksum(const ComplexField& f)
{
    std::uint64_t h = 14695981039346656037ull;
    for (Eigen::Index i = 0; i < f.values().size(); ++i) {
        const double re = f[i].real(), im = f[i].imag();
        h = fnv_bytes(h, &re, sizeof re);
        h = fnv_bytes(h, &im, sizeof im);
    }
    return h;
}

std::uint64_t checksum(const RealField& f) { return checksum(to_complex(f)); }

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace qf
