#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace cwave {

// Truncated Taylor series c[k] = f^{(k)}(z₀)/k!, k = 0..N.
template <int N>
struct Jet {
    std::array<std::complex<double>, N + 1> c{};

    static Jet constant(std::complex<double> v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    static Jet variable(std::complex<double> z0) {
        Jet j;
        j.c[0] = z0;
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }

    std::complex<double> value() const { return c[0]; }
    // k-th derivative.
    std::complex<double> d(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }

    Jet operator-() const {
        Jet r;
        for (int k = 0; k <= N; ++k) r.c[k] = -c[k];
        return r;
    }
    Jet& operator+=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] += o.c[k];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
        return *this;
    }
};

template <int N> Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N> Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N> Jet<N> operator+(Jet<N> a, std::complex<double> s) { a.c[0] += s; return a; }
template <int N> Jet<N> operator-(Jet<N> a, std::complex<double> s) { a.c[0] -= s; return a; }
template <int N> Jet<N> operator-(std::complex<double> s, const Jet<N>& a) { return -a + s; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k)
        for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
    return r;
}
template <int N>
Jet<N> operator*(Jet<N> a, std::complex<double> s) {
    for (auto& v : a.c) v *= s;
    return a;
}
template <int N>
Jet<N> operator*(std::complex<double> s, Jet<N> a) { return a * s; }

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) {
    Jet<N> r;
    for (int k = 0; k <= N; ++k) {
        std::complex<double> s = a.c[k];
        for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
        r.c[k] = s / b.c[0];
    }
    return r;
}
template <int N>
Jet<N> operator/(std::complex<double> s, const Jet<N>& b) { return Jet<N>::constant(s) / b; }

template <int N>
Jet<N> exp(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        std::complex<double> s = 0.0;
        for (int i = 1; i <= k; ++i) s += static_cast<double>(i) * a.c[i] * r.c[k - i];
        r.c[k] = s / static_cast<double>(k);
    }
    return r;
}

// Principal branch.
template <int N>
Jet<N> log(const Jet<N>& a) {
    Jet<N> r;
    r.c[0] = std::log(a.c[0]);
    for (int k = 1; k <= N; ++k) {
        std::complex<double> s = static_cast<double>(k) * a.c[k];
        for (int i = 1; i < k; ++i) s -= static_cast<double>(i) * r.c[i] * a.c[k - i];
        r.c[k] = s / (static_cast<double>(k) * a.c[0]);
    }
    return r;
}

template <int N>
Jet<N> pow(const Jet<N>& a, double p) { return exp(log(a) * std::complex<double>(p, 0.0)); }

template <int N>
Jet<N> ipow(const Jet<N>& a, int k) {
    Jet<N> r = Jet<N>::constant(1.0);
    for (int i = 0; i < k; ++i) r = r * a;
    return r;
}

// Jet of f' from the jet of f; the top coefficient is lost.
template <int N>
Jet<N> derivative(const Jet<N>& a) {
    Jet<N> r;
    for (int k = 0; k < N; ++k) r.c[k] = a.c[k + 1] * static_cast<double>(k + 1);
    return r;
}

}  // namespace cwave
