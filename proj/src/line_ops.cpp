#include "cwave/line_ops.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "cwave/errors.hpp"

namespace cwave {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct LineOps::Impl {
    std::size_t n = 0, N = 0;
    fftw_plan fwd = nullptr, bwd = nullptr;
    std::vector<std::size_t> band;       // indices of the fit band
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;  // scaled real basis on the band
    Eigen::VectorXd scale;
    std::vector<cvec> pow;               // pow[k][j] = (x_j − i s)^{−k}, k = 0..K+1
    cvec w_hilbert, w_deriv, w_absd;     // kernel spectra, pre-scaled by 1/N
    mutable std::mutex cache_mutex;
    mutable std::map<double, std::shared_ptr<const cvec>> poisson_cache;

    void forward(cvec& buf) const {
        fftw_execute_dft(fwd, reinterpret_cast<fftw_complex*>(buf.data()),
                         reinterpret_cast<fftw_complex*>(buf.data()));
    }
    void backward(cvec& buf) const {
        fftw_execute_dft(bwd, reinterpret_cast<fftw_complex*>(buf.data()),
                         reinterpret_cast<fftw_complex*>(buf.data()));
    }

    // Kernel samples w_m at offsets m = −(n−1)..(n−1) placed at m mod N.
    template <class W>
    cvec spectrum(W&& w) const {
        cvec buf(N, cplx(0.0, 0.0));
        for (std::size_t m = 0; m < n; ++m) buf[m] = w(static_cast<long>(m));
        for (std::size_t m = 1; m < n; ++m) buf[N - m] = w(-static_cast<long>(m));
        forward(buf);
        const double inv = 1.0 / static_cast<double>(N);
        for (auto& v : buf) v *= inv;
        return buf;
    }

    std::shared_ptr<const cvec> poisson_spectrum(double y, double h) const {
        {
            std::lock_guard<std::mutex> lk(cache_mutex);
            auto it = poisson_cache.find(y);
            if (it != poisson_cache.end()) return it->second;
        }
        const double e = std::exp(y * M_PI / h);
        auto sp = std::make_shared<const cvec>(spectrum([&](long m) {
            double mh = static_cast<double>(m) * h;
            double sgn = (m % 2 == 0) ? 1.0 : -1.0;
            return cplx((h / M_PI) * (-y) * (1.0 - sgn * e) / (y * y + mh * mh), 0.0);
        }));
        std::lock_guard<std::mutex> lk(cache_mutex);
        if (poisson_cache.size() > 96) poisson_cache.clear();
        poisson_cache.emplace(y, sp);
        return sp;
    }
};

LineOps::LineOps(const Grid& g) : grid_(g), s_(kScaleFraction * g.L), impl_(std::make_unique<Impl>()) {
    Impl& im = *impl_;
    im.n = g.n;
    im.N = 2 * g.n;
    {
        std::lock_guard<std::mutex> lk(planner_mutex());
        fftw_complex* tmp = fftw_alloc_complex(im.N);
        im.fwd = fftw_plan_dft_1d(static_cast<int>(im.N), tmp, tmp, FFTW_FORWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
        im.bwd = fftw_plan_dft_1d(static_cast<int>(im.N), tmp, tmp, FFTW_BACKWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(tmp);
    }
    const double h = g.spacing;
    const rvec x = g.nodes();

    im.pow.assign(K + 2, cvec(im.n));
    for (std::size_t j = 0; j < im.n; ++j) {
        cplx inv = 1.0 / cplx(x[j], -s_);
        cplx acc(1.0, 0.0);
        for (int k = 0; k <= K + 1; ++k) {
            im.pow[k][j] = acc;
            acc *= inv;
        }
    }

    for (std::size_t j = 0; j < im.n; ++j)
        if (std::abs(x[j]) >= (1.0 - kBand) * g.L) im.band.push_back(j);
    const Eigen::Index m = static_cast<Eigen::Index>(im.band.size());
    // Real basis {Re g_k, Im g_k}: real inputs then give conjugate-paired
    // coefficients to rounding.
    Eigen::MatrixXd A(m, 2 * K);
    for (Eigen::Index r = 0; r < m; ++r) {
        std::size_t j = im.band[r];
        for (int k = 1; k <= K; ++k) {
            A(r, k - 1) = im.pow[k][j].real();
            A(r, K + k - 1) = im.pow[k][j].imag();
        }
    }
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < A.cols(); ++c) A.col(c) /= scale(c);
    // Householder QR keeps the fitted residual at rounding level; an explicit
    // pseudo-inverse loses a factor of the basis condition number.
    im.scale = scale;
    im.qr.compute(A);

    im.w_hilbert = im.spectrum([](long m) {
        return cplx((m % 2 != 0) ? 2.0 / (M_PI * static_cast<double>(m)) : 0.0, 0.0);
    });
    im.w_deriv = im.spectrum([h](long m) {
        if (m == 0) return cplx(0.0, 0.0);
        double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        return cplx(sgn / (static_cast<double>(m) * h), 0.0);
    });
    im.w_absd = im.spectrum([h](long m) {
        if (m == 0) return cplx(M_PI / (2.0 * h), 0.0);
        if (m % 2 == 0) return cplx(0.0, 0.0);
        double md = static_cast<double>(m);
        return cplx(-2.0 / (M_PI * md * md * h), 0.0);
    });
}

LineOps::~LineOps() {
    std::lock_guard<std::mutex> lk(planner_mutex());
    if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
    if (impl_->bwd) fftw_destroy_plan(impl_->bwd);
}

std::shared_ptr<const LineOps> LineOps::get(const Grid& g) {
    static std::mutex mu;
    static std::map<std::pair<double, std::size_t>, std::shared_ptr<const LineOps>> cache;
    std::lock_guard<std::mutex> lk(mu);
    auto key = std::make_pair(g.L, g.n);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto ops = std::make_shared<const LineOps>(g);
    cache.emplace(key, ops);
    return ops;
}

LineOps::TailFit LineOps::fit(const cvec& f) const {
    const Impl& im = *impl_;
    if (f.size() != im.n) throw IllPosedInput("field size does not match grid");
    const Eigen::Index m = static_cast<Eigen::Index>(im.band.size());
    Eigen::MatrixXd b(m, 2);
    for (Eigen::Index r = 0; r < m; ++r) {
        b(r, 0) = f[im.band[r]].real();
        b(r, 1) = f[im.band[r]].imag();
    }
    Eigen::MatrixXd c = im.qr.solve(b);
    for (Eigen::Index r = 0; r < c.rows(); ++r) c.row(r) /= im.scale(r);
    TailFit t;
    const cplx i(0.0, 1.0);
    for (int k = 0; k < K; ++k) {
        cplx re = 0.5 * cplx(c(k, 0), -c(K + k, 0));
        cplx imv = 0.5 * cplx(c(k, 1), -c(K + k, 1));
        t.p[k] = re + i * imv;
        t.q[k] = std::conj(re) + i * std::conj(imv);
    }
    return t;
}

cvec LineOps::tail_values(const TailFit& t) const {
    const Impl& im = *impl_;
    cvec out(im.n, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < im.n; ++j) {
        cplx acc(0.0, 0.0);
        for (int k = 1; k <= K; ++k)
            acc += t.p[k - 1] * im.pow[k][j] + t.q[k - 1] * std::conj(im.pow[k][j]);
        out[j] = acc;
    }
    return out;
}

std::vector<cvec> LineOps::apply(const cvec& f, const std::vector<Op>& ops) const {
    const Impl& im = *impl_;
    TailFit t = fit(f);
    cvec tail = tail_values(t);
    cvec spec(im.N, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < im.n; ++j) spec[j] = f[j] - tail[j];
    im.forward(spec);

    std::vector<cvec> outs;
    outs.reserve(ops.size());
    cvec buf(im.N);
    const cplx I(0.0, 1.0);
    for (Op op : ops) {
        const cvec& w = op == Op::hilbert_std ? im.w_hilbert : op == Op::deriv ? im.w_deriv : im.w_absd;
        kernels::cmul(spec.data(), w.data(), buf.data(), im.N);
        im.backward(buf);
        cvec out(im.n);
        for (std::size_t j = 0; j < im.n; ++j) {
            cplx gp(0.0, 0.0), gm(0.0, 0.0);
            if (op == Op::hilbert_std) {
                for (int k = 1; k <= K; ++k) {
                    gp += t.p[k - 1] * im.pow[k][j];
                    gm += t.q[k - 1] * std::conj(im.pow[k][j]);
                }
                out[j] = buf[j] + I * gp - I * gm;
            } else {
                for (int k = 1; k <= K; ++k) {
                    double kk = static_cast<double>(k);
                    gp -= kk * t.p[k - 1] * im.pow[k + 1][j];
                    gm -= kk * t.q[k - 1] * std::conj(im.pow[k + 1][j]);
                }
                out[j] = op == Op::deriv ? buf[j] + gp + gm : buf[j] + I * gp - I * gm;
            }
        }
        outs.push_back(std::move(out));
    }
    return outs;
}

cvec LineOps::apply(const cvec& f, Op op) const { return std::move(apply(f, std::vector<Op>{op})[0]); }

std::pair<cvec, cvec> LineOps::poisson_with_absd(const cvec& f, double y) const {
    if (y > 0.0) throw IllPosedInput("Poisson extension requires y <= 0");
    const Impl& im = *impl_;
    if (y == 0.0) return {f, apply(f, Op::absd)};
    TailFit t = fit(f);
    cvec tail = tail_values(t);
    cvec spec(im.N, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < im.n; ++j) spec[j] = f[j] - tail[j];
    im.forward(spec);
    auto wy = im.poisson_spectrum(y, grid_.spacing);
    cvec a(im.N), b(im.N);
    kernels::cmul(spec.data(), wy->data(), a.data(), im.N);
    kernels::cmul(a.data(), im.w_absd.data(), b.data(), im.N);
    // w_absd carries the 1/N factor once more; undo it on the product.
    const double Nd = static_cast<double>(im.N);
    for (auto& v : b) v *= Nd;
    im.backward(a);
    im.backward(b);
    cvec u(im.n), uy(im.n);
    const cplx I(0.0, 1.0);
    const rvec x = grid_.nodes();
    for (std::size_t j = 0; j < im.n; ++j) {
        cplx zp(x[j], y - s_), zm(x[j], -y + s_);
        cplx ip = 1.0 / zp, imn = 1.0 / zm;
        cplx ap = ip, am = imn;
        cplx gp(0.0, 0.0), gm(0.0, 0.0), dgp(0.0, 0.0), dgm(0.0, 0.0);
        for (int k = 1; k <= K; ++k) {
            double kk = static_cast<double>(k);
            gp += t.p[k - 1] * ap;
            gm += t.q[k - 1] * am;
            dgp -= kk * t.p[k - 1] * ap * ip;
            dgm -= kk * t.q[k - 1] * am * imn;
            ap *= ip;
            am *= imn;
        }
        u[j] = a[j] + gp + gm;
        uy[j] = b[j] + I * dgp - I * dgm;
    }
    return {std::move(u), std::move(uy)};
}

cvec LineOps::poisson(const cvec& f, double y) const {
    if (y > 0.0) throw IllPosedInput("Poisson extension requires y <= 0");
    if (y == 0.0) return f;
    const Impl& im = *impl_;
    TailFit t = fit(f);
    cvec tail = tail_values(t);
    cvec spec(im.N, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < im.n; ++j) spec[j] = f[j] - tail[j];
    im.forward(spec);
    auto wy = im.poisson_spectrum(y, grid_.spacing);
    kernels::cmul(spec.data(), wy->data(), spec.data(), im.N);
    im.backward(spec);
    cvec u(im.n);
    const rvec x = grid_.nodes();
    for (std::size_t j = 0; j < im.n; ++j) {
        cplx ip = 1.0 / cplx(x[j], y - s_), imn = 1.0 / cplx(x[j], -y + s_);
        cplx ap = ip, am = imn, acc(0.0, 0.0);
        for (int k = 1; k <= K; ++k) {
            acc += t.p[k - 1] * ap + t.q[k - 1] * am;
            ap *= ip;
            am *= imn;
        }
        u[j] = spec[j] + acc;
    }
    return u;
}

kernels::PointSum LineOps::point(const cvec& f, double x, double y) const {
    TailFit t = fit(f);
    cvec tail = tail_values(t);
    cvec core(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) core[j] = f[j] - tail[j];
    return point(core, t, x, y);
}

kernels::PointSum LineOps::point(const cvec& core, const TailFit& t, double x, double y) const {
    if (y > 0.0) throw IllPosedInput("point evaluation requires y <= 0");
    const double h = grid_.spacing, x0 = -grid_.L, a = M_PI / h;
    const std::size_t n = grid_.n;
    cplx e0 = std::exp(y * a) * std::exp(cplx(0.0, a * (x - x0)));
    kernels::PointSum s{};
    std::size_t hit = n;
    if (y == 0.0) {
        double r = (x - x0) / h;
        double jr = std::round(r);
        if (std::abs(r - jr) < 1e-9 && jr >= 0.0 && jr < static_cast<double>(n))
            hit = static_cast<std::size_t>(jr);
    }
    if (hit < n) {
        kernels::PointSum lo = kernels::bandlimited(core.data(), 0, hit, x0, h, x, y, e0);
        kernels::PointSum hi = kernels::bandlimited(core.data(), hit + 1, n, x0, h, x, y, e0);
        s.value = (h / M_PI) * (lo.value + hi.value) + core[hit];
        s.dx = (h / M_PI) * (lo.dx + hi.dx);
    } else {
        s = kernels::bandlimited(core.data(), 0, n, x0, h, x, y, e0);
        s.value *= h / M_PI;
        s.dx *= h / M_PI;
    }
    cplx ip = 1.0 / cplx(x, y - s_), imn = 1.0 / cplx(x, -y + s_);
    cplx ap = ip, am = imn;
    for (int k = 1; k <= K; ++k) {
        double kk = static_cast<double>(k);
        s.value += t.p[k - 1] * ap + t.q[k - 1] * am;
        s.dx -= kk * (t.p[k - 1] * ap * ip + t.q[k - 1] * am * imn);
        ap *= ip;
        am *= imn;
    }
    return s;
}

}  // namespace cwave
