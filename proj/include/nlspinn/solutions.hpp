#pragma once

// Closed-form solutions of i u_t + u_xx + |u|^{alpha-1} u = 0.
//
// Every formula is written once over complex jets, so evaluating at seeded
// inputs yields u together with exact u_t, u_x and u_xx.

#include <complex>
#include <string>
#include <string_view>

#include "nlspinn/jets.hpp"

namespace nlspinn {

enum class SolutionKind { Soliton, Peregrine, KuznetsovMa, StandingWave };

std::string_view to_string(SolutionKind kind);
SolutionKind solution_kind_from_string(std::string_view name);

struct SolutionSample {
    std::complex<double> u;
    std::complex<double> u_x;
};

// Soliton: c > 0, nu real.
Jet2 soliton_jet(double c, double nu, const RealJet& t, const RealJet& x);
SolutionSample soliton(double c, double nu, double t, double x);

Jet2 peregrine_jet(const RealJet& t, const RealJet& x);
SolutionSample peregrine(double t, double x);

// Kuznetsov-Ma breather, a > 1/2. Throws PoleError when the denominator is
// within 1e-12 of zero.
Jet2 kuznetsov_ma_jet(double a, const RealJet& t, const RealJet& x);
SolutionSample kuznetsov_ma(double a, double t, double x);

struct KmFrequencies {
    double alpha_tilde;
    double beta_tilde;
};
KmFrequencies km_frequencies(double a);

// Standing wave for omega > 0 and alpha in (1, 5).
Jet2 standing_wave_jet(double omega, double alpha, const RealJet& t, const RealJet& x);
SolutionSample standing_wave(double omega, double alpha, double t, double x);

class ReferenceSolution {
public:
    static ReferenceSolution make_soliton(double c, double nu);
    static ReferenceSolution make_peregrine();
    static ReferenceSolution make_kuznetsov_ma(double a);
    static ReferenceSolution make_standing_wave(double omega, double alpha);

    SolutionKind kind() const { return kind_; }
    double c() const { return c_; }
    double nu() const { return nu_; }
    double a() const { return a_; }
    double omega() const { return omega_; }
    // Power of the nonlinearity this solution solves.
    double alpha() const { return alpha_; }

    Jet2 jet(double t, double x) const;
    SolutionSample operator()(double t, double x) const;
    std::complex<double> value(double t, double x) const { return (*this)(t, x).u; }

    std::string describe() const;

private:
    ReferenceSolution() = default;
    SolutionKind kind_ = SolutionKind::Soliton;
    double c_ = 1.0, nu_ = 1.0, a_ = 0.75, omega_ = 1.0, alpha_ = 3.0;
};

}  // namespace nlspinn
