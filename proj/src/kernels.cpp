#include "cwave/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace cwave::kernels {
namespace {

void cmul_scalar(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double ar = a[j].real(), ai = a[j].imag(), br = b[j].real(), bi = b[j].imag();
        out[j] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void axpy_scalar(double s, const cplx* x, const cplx* y, cplx* out, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j)
        out[j] = cplx(y[j].real() + s * x[j].real(), y[j].imag() + s * x[j].imag());
}

double dot_re_scalar(const cplx* a, const cplx* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j].real() * b[j].real() + a[j].imag() * b[j].imag();
    return acc;
}

PointSum bandlimited_scalar(const cplx* c, std::size_t begin, std::size_t end, double x0,
                            double h, double x, double y, cplx e0) {
    const double a = M_PI / h;
    double vr = 0.0, vi = 0.0, dr = 0.0, di = 0.0;
    double sign = (begin % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t j = begin; j < end; ++j, sign = -sign) {
        double d = x - (x0 + static_cast<double>(j) * h);
        double er = sign * e0.real(), ei = sign * e0.imag();
        double q = y * y + d * d;
        // Re[(E − 1)·conj(ζ)] / |ζ|²
        double r = ((er - 1.0) * y + ei * d) / q;
        // N = aEζ − (E − 1); t = −Im[N·conj(ζ)²] / |ζ|⁴
        double nr = a * (er * y - ei * d) - (er - 1.0);
        double ni = a * (er * d + ei * y) - ei;
        double c2r = y * y - d * d, c2i = -2.0 * y * d;
        double pi_ = nr * c2i + ni * c2r;
        double t = -pi_ / (q * q);
        vr += c[j].real() * r;
        vi += c[j].imag() * r;
        dr += c[j].real() * t;
        di += c[j].imag() * t;
    }
    return {cplx(vr, vi), cplx(dr, di)};
}

double chord_arc_row_scalar(const double* zr, const double* zi, const double* s, std::size_t i,
                            std::size_t n, double floor) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < n; ++j) {
        double ds = s[j] - s[i];
        if (!(ds > floor)) continue;
        double dx = zr[j] - zr[i], dy = zi[j] - zi[i];
        double r = (dx * dx + dy * dy) / (ds * ds);
        if (r < best) best = r;
    }
    return best;
}

const Table kScalar{cmul_scalar, axpy_scalar, dot_re_scalar, bandlimited_scalar,
                    chord_arc_row_scalar};

Isa detect() {
    const char* env = std::getenv("CWAVE_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (avx2_supported()) return Isa::avx2;
    return Isa::scalar;
}

std::atomic<int>& selected() {
    static std::atomic<int> isa{static_cast<int>(detect())};
    return isa;
}

}  // namespace

namespace detail {
const Table& scalar_table() { return kScalar; }
}  // namespace detail

bool avx2_supported() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

Isa active_isa() { return static_cast<Isa>(selected().load(std::memory_order_relaxed)); }

void set_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_supported()) isa = Isa::scalar;
    selected().store(static_cast<int>(isa), std::memory_order_relaxed);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const Table& table(Isa isa) {
    return isa == Isa::avx2 ? detail::avx2_table() : detail::scalar_table();
}

static const Table& current() { return table(active_isa()); }

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) { current().cmul(a, b, out, n); }
void axpy(double s, const cplx* x, const cplx* y, cplx* out, std::size_t n) {
    current().axpy(s, x, y, out, n);
}
double dot_re(const cplx* a, const cplx* b, std::size_t n) { return current().dot_re(a, b, n); }
PointSum bandlimited(const cplx* c, std::size_t begin, std::size_t end, double x0, double h,
                     double x, double y, cplx e0) {
    return current().bandlimited(c, begin, end, x0, h, x, y, e0);
}
double chord_arc_row(const double* zr, const double* zi, const double* s, std::size_t i,
                     std::size_t n, double floor) {
    return current().chord_arc_row(zr, zi, s, i, n, floor);
}

}  // namespace cwave::kernels
