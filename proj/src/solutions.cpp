#include "nlspinn/solutions.hpp"

#include <cmath>
#include <sstream>

#include "nlspinn/errors.hpp"

namespace nlspinn {
namespace {

SolutionSample sample(const Jet2& j) { return {j.u(), j.u_x()}; }

}  // namespace

std::string_view to_string(SolutionKind kind) {
    switch (kind) {
        case SolutionKind::Soliton: return "soliton";
        case SolutionKind::Peregrine: return "peregrine";
        case SolutionKind::KuznetsovMa: return "kuznetsov_ma";
        case SolutionKind::StandingWave: return "standing_wave";
    }
    return "unknown";
}

SolutionKind solution_kind_from_string(std::string_view name) {
    if (name == "soliton") return SolutionKind::Soliton;
    if (name == "peregrine") return SolutionKind::Peregrine;
    if (name == "kuznetsov_ma" || name == "km") return SolutionKind::KuznetsovMa;
    if (name == "standing_wave") return SolutionKind::StandingWave;
    throw ConfigError("unknown solution kind '" + std::string(name) + "'");
}

Jet2 soliton_jet(double c, double nu, const RealJet& t, const RealJet& x) {
    if (!(c > 0.0)) throw DomainError("soliton requires c > 0");
    const RealJet phase = (0.5 * nu) * x - (0.25 * nu * nu - c) * t;
    const RealJet profile = std::sqrt(2.0 * c) * sech(std::sqrt(c) * (x - nu * t));
    return profile * expi(phase);
}

SolutionSample soliton(double c, double nu, double t, double x) {
    const InputJets in = seed_input(t, x);
    return sample(soliton_jet(c, nu, in.t, in.x));
}

Jet2 peregrine_jet(const RealJet& t, const RealJet& x) {
    const RealJet denom = 1.0 + 4.0 * t * t + 2.0 * x * x;
    const Jet2 numer{RealJet(4.0), 8.0 * t};  // 4 (1 + 2 i t)
    const Jet2 rational = reciprocal(denom) * numer;
    return expi(t) * (Jet2(RealJet(1.0)) - rational);
}

SolutionSample peregrine(double t, double x) {
    const InputJets in = seed_input(t, x);
    return sample(peregrine_jet(in.t, in.x));
}

KmFrequencies km_frequencies(double a) {
    if (!(a > 0.5)) throw DomainError("Kuznetsov-Ma breather requires a > 1/2");
    return {std::sqrt(8.0 * a * (2.0 * a - 1.0)), std::sqrt(2.0 * (2.0 * a - 1.0))};
}

Jet2 kuznetsov_ma_jet(double a, const RealJet& t, const RealJet& x) {
    const auto [at, bt] = km_frequencies(a);
    const RealJet ct = cos(at * t);
    const RealJet st = sin(at * t);
    const RealJet denom = at * cosh(bt * x) - (std::sqrt(2.0) * bt) * ct;
    if (std::abs(denom.v) < 1e-12) throw PoleError("Kuznetsov-Ma breather evaluated at a pole");
    const Jet2 numer{(bt * bt) * ct, at * st};
    const Jet2 bump = (std::sqrt(2.0) * bt) * (reciprocal(denom) * numer);
    return expi(t) * (Jet2(RealJet(1.0)) - bump);
}

SolutionSample kuznetsov_ma(double a, double t, double x) {
    const InputJets in = seed_input(t, x);
    return sample(kuznetsov_ma_jet(a, in.t, in.x));
}

Jet2 standing_wave_jet(double omega, double alpha, const RealJet& t, const RealJet& x) {
    if (!(omega > 0.0)) throw DomainError("standing wave requires omega > 0");
    if (!(alpha > 1.0 && alpha < 5.0)) throw DomainError("standing wave requires alpha in (1, 5)");
    const RealJet s = sech((0.5 * (alpha - 1.0) * std::sqrt(omega)) * x);
    const RealJet base = (0.5 * (alpha + 1.0) * omega) * (s * s);
    return pow(base, 1.0 / (alpha - 1.0)) * expi(omega * t);
}

SolutionSample standing_wave(double omega, double alpha, double t, double x) {
    const InputJets in = seed_input(t, x);
    return sample(standing_wave_jet(omega, alpha, in.t, in.x));
}

ReferenceSolution ReferenceSolution::make_soliton(double c, double nu) {
    if (!(c > 0.0)) throw DomainError("soliton requires c > 0");
    ReferenceSolution s;
    s.kind_ = SolutionKind::Soliton;
    s.c_ = c;
    s.nu_ = nu;
    return s;
}

ReferenceSolution ReferenceSolution::make_peregrine() {
    ReferenceSolution s;
    s.kind_ = SolutionKind::Peregrine;
    return s;
}

ReferenceSolution ReferenceSolution::make_kuznetsov_ma(double a) {
    km_frequencies(a);
    ReferenceSolution s;
    s.kind_ = SolutionKind::KuznetsovMa;
    s.a_ = a;
    return s;
}

ReferenceSolution ReferenceSolution::make_standing_wave(double omega, double alpha) {
    if (!(omega > 0.0)) throw DomainError("standing wave requires omega > 0");
    if (!(alpha > 1.0 && alpha < 5.0)) throw DomainError("standing wave requires alpha in (1, 5)");
    ReferenceSolution s;
    s.kind_ = SolutionKind::StandingWave;
    s.omega_ = omega;
    s.alpha_ = alpha;
    return s;
}

Jet2 ReferenceSolution::jet(double t, double x) const {
    const InputJets in = seed_input(t, x);
    switch (kind_) {
        case SolutionKind::Soliton: return soliton_jet(c_, nu_, in.t, in.x);
        case SolutionKind::Peregrine: return peregrine_jet(in.t, in.x);
        case SolutionKind::KuznetsovMa: return kuznetsov_ma_jet(a_, in.t, in.x);
        case SolutionKind::StandingWave: return standing_wave_jet(omega_, alpha_, in.t, in.x);
    }
    return {};
}

SolutionSample ReferenceSolution::operator()(double t, double x) const { return sample(jet(t, x)); }

std::string ReferenceSolution::describe() const {
    std::ostringstream os;
    os << to_string(kind_);
    switch (kind_) {
        case SolutionKind::Soliton: os << "(c=" << c_ << ", nu=" << nu_ << ")"; break;
        case SolutionKind::Peregrine: break;
        case SolutionKind::KuznetsovMa: os << "(a=" << a_ << ")"; break;
        case SolutionKind::StandingWave: os << "(omega=" << omega_ << ", alpha=" << alpha_ << ")"; break;
    }
    return os.str();
}

}  // namespace nlspinn
