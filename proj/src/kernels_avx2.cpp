#include <immintrin.h>

#include <cmath>
#include <limits>

#include "cwave/kernels.hpp"

namespace cwave::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void cmul_avx2(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* po = reinterpret_cast<double*>(out);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * j);
        __m256d vb = _mm256_loadu_pd(pb + 2 * j);
        __m256d are = _mm256_movedup_pd(va);          // ar ar
        __m256d aim = _mm256_permute_pd(va, 0xF);     // ai ai
        __m256d bsw = _mm256_permute_pd(vb, 0x5);     // bi br
        __m256d t = _mm256_mul_pd(aim, bsw);          // ai·bi  ai·br
        __m256d r = _mm256_fmaddsub_pd(are, vb, t);   // ar·br − ai·bi, ar·bi + ai·br
        _mm256_storeu_pd(po + 2 * j, r);
    }
    for (; j < n; ++j) {
        double ar = a[j].real(), ai = a[j].imag(), br = b[j].real(), bi = b[j].imag();
        out[j] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void axpy_avx2(double s, const cplx* x, const cplx* y, cplx* out, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    const double* py = reinterpret_cast<const double*>(y);
    double* po = reinterpret_cast<double*>(out);
    const std::size_t m = 2 * n;
    __m256d vs = _mm256_set1_pd(s);
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4)
        _mm256_storeu_pd(po + j, _mm256_fmadd_pd(vs, _mm256_loadu_pd(px + j), _mm256_loadu_pd(py + j)));
    for (; j < m; ++j) po[j] = std::fma(s, px[j], py[j]);
}

double dot_re_avx2(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    const std::size_t m = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(pa + j), _mm256_loadu_pd(pb + j), acc);
    double r = hsum(acc);
    for (; j < m; ++j) r += pa[j] * pb[j];
    return r;
}

PointSum bandlimited_avx2(const cplx* c, std::size_t begin, std::size_t end, double x0,
                          double h, double x, double y, cplx e0) {
    const double a = M_PI / h;
    const double* pc = reinterpret_cast<const double*>(c);
    double sign0 = (begin % 2 == 0) ? 1.0 : -1.0;
    __m256d vsign = _mm256_set_pd(-sign0, sign0, -sign0, sign0);
    __m256d ver0 = _mm256_set1_pd(e0.real()), vei0 = _mm256_set1_pd(e0.imag());
    __m256d vy = _mm256_set1_pd(y), vy2 = _mm256_set1_pd(y * y), va = _mm256_set1_pd(a);
    __m256d one = _mm256_set1_pd(1.0), two = _mm256_set1_pd(2.0);
    __m256d vx = _mm256_set1_pd(x - x0), vh = _mm256_set1_pd(h);
    __m256d vr = _mm256_setzero_pd(), vd = _mm256_setzero_pd();
    __m256d vr2 = _mm256_setzero_pd(), vd2 = _mm256_setzero_pd();
    __m256d er = _mm256_mul_pd(vsign, ver0), ei = _mm256_mul_pd(vsign, vei0);
    std::size_t j = begin;
    for (; j + 4 <= end; j += 4) {
        __m256d jj = _mm256_set_pd(double(j + 3), double(j + 2), double(j + 1), double(j));
        __m256d d = _mm256_fnmadd_pd(jj, vh, vx);     // x − x0 − j·h
        __m256d d2 = _mm256_mul_pd(d, d);
        __m256d q = _mm256_add_pd(vy2, d2);
        __m256d erm1 = _mm256_sub_pd(er, one);
        __m256d r = _mm256_div_pd(_mm256_fmadd_pd(erm1, vy, _mm256_mul_pd(ei, d)), q);
        __m256d nr = _mm256_fmsub_pd(va, _mm256_fmsub_pd(er, vy, _mm256_mul_pd(ei, d)), erm1);
        __m256d ni = _mm256_fmsub_pd(va, _mm256_fmadd_pd(er, d, _mm256_mul_pd(ei, vy)), ei);
        __m256d c2r = _mm256_sub_pd(vy2, d2);
        __m256d c2i = _mm256_mul_pd(_mm256_mul_pd(two, vy), d);
        c2i = _mm256_sub_pd(_mm256_setzero_pd(), c2i);
        __m256d pim = _mm256_fmadd_pd(nr, c2i, _mm256_mul_pd(ni, c2r));
        __m256d t = _mm256_div_pd(_mm256_sub_pd(_mm256_setzero_pd(), pim), _mm256_mul_pd(q, q));
        __m256d clo = _mm256_loadu_pd(pc + 2 * j);       // c_j, c_{j+1}
        __m256d chi = _mm256_loadu_pd(pc + 2 * j + 4);   // c_{j+2}, c_{j+3}
        __m256d rlo = _mm256_permute4x64_pd(r, 0x50), rhi = _mm256_permute4x64_pd(r, 0xFA);
        __m256d tlo = _mm256_permute4x64_pd(t, 0x50), thi = _mm256_permute4x64_pd(t, 0xFA);
        vr = _mm256_fmadd_pd(clo, rlo, vr);
        vr2 = _mm256_fmadd_pd(chi, rhi, vr2);
        vd = _mm256_fmadd_pd(clo, tlo, vd);
        vd2 = _mm256_fmadd_pd(chi, thi, vd2);
    }
    vr = _mm256_add_pd(vr, vr2);
    vd = _mm256_add_pd(vd, vd2);
    alignas(32) double bv[4], bd[4];
    _mm256_store_pd(bv, vr);
    _mm256_store_pd(bd, vd);
    PointSum out{cplx(bv[0] + bv[2], bv[1] + bv[3]), cplx(bd[0] + bd[2], bd[1] + bd[3])};
    if (j < end) {
        PointSum tail = detail::scalar_table().bandlimited(c, j, end, x0, h, x, y, e0);
        out.value += tail.value;
        out.dx += tail.dx;
    }
    return out;
}

double chord_arc_row_avx2(const double* zr, const double* zi, const double* s, std::size_t i,
                          std::size_t n, double floor) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d best = _mm256_set1_pd(inf);
    __m256d xr = _mm256_set1_pd(zr[i]), xi = _mm256_set1_pd(zi[i]), si = _mm256_set1_pd(s[i]);
    __m256d vfloor = _mm256_set1_pd(floor), vinf = _mm256_set1_pd(inf);
    std::size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
        __m256d ds = _mm256_sub_pd(_mm256_loadu_pd(s + j), si);
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(zr + j), xr);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(zi + j), xi);
        __m256d num = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
        __m256d r = _mm256_div_pd(num, _mm256_mul_pd(ds, ds));
        __m256d ok = _mm256_cmp_pd(ds, vfloor, _CMP_GT_OQ);
        r = _mm256_blendv_pd(vinf, r, ok);
        best = _mm256_min_pd(best, r);
    }
    alignas(32) double b[4];
    _mm256_store_pd(b, best);
    double m = std::fmin(std::fmin(b[0], b[1]), std::fmin(b[2], b[3]));
    for (; j < n; ++j) {
        double ds = s[j] - s[i];
        if (!(ds > floor)) continue;
        double dx = zr[j] - zr[i], dy = zi[j] - zi[i];
        double r = (dx * dx + dy * dy) / (ds * ds);
        if (r < m) m = r;
    }
    return m;
}

const Table kAvx2{cmul_avx2, axpy_avx2, dot_re_avx2, bandlimited_avx2, chord_arc_row_avx2};

}  // namespace

namespace detail {
const Table& avx2_table() { return kAvx2; }
}  // namespace detail

}  // namespace cwave::kernels
