#pragma once

#include <cstddef>

#include "cwave/grid.hpp"

// Hot loops with a portable scalar reference and an AVX2/FMA variant.
// The variant is chosen once at runtime from the CPU feature bits; the
// environment variable CWAVE_SIMD=scalar|avx2 overrides the choice.
namespace cwave::kernels {

enum class Isa { scalar, avx2 };

struct PointSum {
    cplx value;
    cplx dx;
};

struct Table {
    void (*cmul)(const cplx* a, const cplx* b, cplx* out, std::size_t n);
    void (*axpy)(double s, const cplx* x, const cplx* y, cplx* out, std::size_t n);
    double (*dot_re)(const cplx* a, const cplx* b, std::size_t n);
    PointSum (*bandlimited)(const cplx* c, std::size_t begin, std::size_t end, double x0,
                            double h, double x, double y, cplx e0);
    double (*chord_arc_row)(const double* zr, const double* zi, const double* s, std::size_t i,
                            std::size_t n, double floor);
};

Isa active_isa();
const char* isa_name(Isa isa);
bool avx2_supported();
// Pin the variant (tests use this to compare the two paths).
void set_isa(Isa isa);
const Table& table(Isa isa);

// out_j = a_j·b_j
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);
// out_j = y_j + s·x_j
void axpy(double s, const cplx* x, const cplx* y, cplx* out, std::size_t n);
// Σ_j Re(conj(a_j)·b_j)
double dot_re(const cplx* a, const cplx* b, std::size_t n);

// Σ_{j∈[begin,end)} c_j·k(x − x_j, y) and its x-derivative, where
// k(d, y) = Re[(e^{ζπ/h} − 1)/ζ], ζ = y + i·d, x_j = x0 + j·h, and
// e0 = e^{(y + i(x − x0))π/h}. Callers exclude exact ζ = 0.
PointSum bandlimited(const cplx* c, std::size_t begin, std::size_t end, double x0, double h,
                     double x, double y, cplx e0);

// min over j > i with s_j − s_i > floor of |z_i − z_j|² / (s_j − s_i)².
double chord_arc_row(const double* zr, const double* zi, const double* s, std::size_t i,
                     std::size_t n, double floor);

namespace detail {
const Table& scalar_table();
const Table& avx2_table();
}  // namespace detail

}  // namespace cwave::kernels
