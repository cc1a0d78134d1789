#pragma once

// Second-order space-time jets.
//
// A RealJet carries f, df/dt, df/dx and d2f/dx2 of a real field at one
// (t, x) point. Complex fields are pairs of real jets (Jet2). Mixed and
// second time derivatives are never needed by the NLS residual and are not
// tracked.

#include <cmath>
#include <complex>
#include <utility>

namespace nlspinn {

struct RealJet {
    double v = 0.0;
    double t = 0.0;
    double x = 0.0;
    double xx = 0.0;

    constexpr RealJet() = default;
    constexpr RealJet(double value) : v(value) {}  // NOLINT: constants promote
    constexpr RealJet(double value, double dt, double dx, double dxx)
        : v(value), t(dt), x(dx), xx(dxx) {}

    bool finite() const {
        return std::isfinite(v) && std::isfinite(t) && std::isfinite(x) && std::isfinite(xx);
    }

    RealJet& operator+=(const RealJet& o) {
        v += o.v; t += o.t; x += o.x; xx += o.xx;
        return *this;
    }
    RealJet& operator-=(const RealJet& o) {
        v -= o.v; t -= o.t; x -= o.x; xx -= o.xx;
        return *this;
    }
};

inline RealJet operator-(const RealJet& a) { return {-a.v, -a.t, -a.x, -a.xx}; }
inline RealJet operator+(RealJet a, const RealJet& b) { return a += b; }
inline RealJet operator-(RealJet a, const RealJet& b) { return a -= b; }

inline RealJet operator*(const RealJet& a, const RealJet& b) {
    return {a.v * b.v,
            a.t * b.v + a.v * b.t,
            a.x * b.v + a.v * b.x,
            a.xx * b.v + 2.0 * a.x * b.x + a.v * b.xx};
}
inline RealJet operator*(double s, const RealJet& a) { return {s * a.v, s * a.t, s * a.x, s * a.xx}; }
inline RealJet operator*(const RealJet& a, double s) { return s * a; }

// Chain rule for a scalar function with value f0, first derivative f1 and
// second derivative f2 at a.v.
inline RealJet chain(const RealJet& a, double f0, double f1, double f2) {
    return {f0, f1 * a.t, f1 * a.x, f2 * a.x * a.x + f1 * a.xx};
}

inline RealJet reciprocal(const RealJet& a) {
    const double r = 1.0 / a.v;
    return chain(a, r, -r * r, 2.0 * r * r * r);
}
inline RealJet operator/(const RealJet& a, const RealJet& b) { return a * reciprocal(b); }
inline RealJet operator/(const RealJet& a, double s) { return (1.0 / s) * a; }
inline RealJet operator/(double s, const RealJet& b) { return s * reciprocal(b); }

inline RealJet sin(const RealJet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, s, c, -s);
}
inline RealJet cos(const RealJet& a) {
    const double s = std::sin(a.v), c = std::cos(a.v);
    return chain(a, c, -s, -c);
}
inline RealJet exp(const RealJet& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline RealJet cosh(const RealJet& a) {
    const double c = std::cosh(a.v), s = std::sinh(a.v);
    return chain(a, c, s, c);
}
inline RealJet sinh(const RealJet& a) {
    const double c = std::cosh(a.v), s = std::sinh(a.v);
    return chain(a, s, c, s);
}
inline RealJet sech(const RealJet& a) {
    const double s = 1.0 / std::cosh(a.v), th = std::tanh(a.v);
    return chain(a, s, -s * th, s * (th * th - s * s));
}
inline RealJet sqrt(const RealJet& a) {
    const double r = std::sqrt(a.v);
    return chain(a, r, 0.5 / r, -0.25 / (r * a.v));
}
// a^e for a > 0.
inline RealJet pow(const RealJet& a, double e) {
    const double p = std::pow(a.v, e);
    return chain(a, p, e * p / a.v, e * (e - 1.0) * p / (a.v * a.v));
}

// Complex-valued jet, stored as real and imaginary real jets.
struct Jet2 {
    RealJet re;
    RealJet im;

    constexpr Jet2() = default;
    constexpr Jet2(const RealJet& r, const RealJet& i = RealJet{}) : re(r), im(i) {}
    Jet2(std::complex<double> c) : re(c.real()), im(c.imag()) {}  // NOLINT

    std::complex<double> u() const { return {re.v, im.v}; }
    std::complex<double> u_t() const { return {re.t, im.t}; }
    std::complex<double> u_x() const { return {re.x, im.x}; }
    std::complex<double> u_xx() const { return {re.xx, im.xx}; }

    bool finite() const { return re.finite() && im.finite(); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.re + b.re, a.im + b.im}; }
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.re - b.re, a.im - b.im}; }
inline Jet2 operator-(const Jet2& a) { return {-a.re, -a.im}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Jet2 operator*(const RealJet& s, const Jet2& a) { return {s * a.re, s * a.im}; }
inline Jet2 operator*(double s, const Jet2& a) { return {s * a.re, s * a.im}; }
inline Jet2 conj(const Jet2& a) { return {a.re, -a.im}; }
inline RealJet abs2(const Jet2& a) { return a.re * a.re + a.im * a.im; }
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    const RealJet inv = reciprocal(abs2(b));
    return inv * (a * conj(b));
}
// e^{i*phase}
inline Jet2 expi(const RealJet& phase) { return {cos(phase), sin(phase)}; }
inline Jet2 exp(const Jet2& a) { return exp(a.re) * expi(a.im); }

// |z|^{alpha-1} z. At z = 0 the value and every derivative are defined as 0,
// which is exact to first order for alpha >= 2.
inline Jet2 modulus_power(const Jet2& z, double alpha) {
    const RealJet r2 = abs2(z);
    if (r2.v == 0.0) return {};
    const RealJet m = pow(r2, 0.5 * (alpha - 1.0));
    return m * z;
}

// Jets of the identity functions (t, x) -> t and (t, x) -> x.
struct InputJets {
    RealJet t;
    RealJet x;
};

inline InputJets seed_input(double t, double x) {
    return {RealJet{t, 1.0, 0.0, 0.0}, RealJet{x, 0.0, 1.0, 0.0}};
}

}  // namespace nlspinn
