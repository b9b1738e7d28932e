#pragma once

// Validated physical scenario and the end-to-end evaluation of one parameter point:
// couplings -> spectral factors -> collective couplings -> rates -> steady occupation.

#include <cmath>
#include <complex>
#include <limits>
#include <optional>

#include "optocool/atom.hpp"
#include "optocool/chain.hpp"
#include "optocool/cooling.hpp"
#include "optocool/params.hpp"

namespace optocool {

/// Direct collective couplings η± that replace the atomic model.
struct EtaOverrides {
    cplx eta_plus{};
    cplx eta_minus{};
};

struct Scenario {
    MirrorSpec mirror;
    DriveSpec probe;
    DriveSpec control;
    AtomCloudSpec cloud;
    std::optional<EnvironmentSpec> environment;
    std::optional<StrategyChoice> strategy;  // set when the placement was designed
    std::optional<EtaOverrides> overrides;

    /// Single-atom parameters with Δ_g = Δ_e = Δ and phase-free Rabi frequencies.
    AtomParams atom() const {
        AtomParams a;
        a.Omega_p = rabi_frequency(probe);
        a.Omega_c = rabi_frequency(control);
        a.delta_g = a.delta_e = cloud.delta();
        a.gamma_p = probe.gamma();
        a.gamma_c = control.gamma();
        a.Gamma_p = probe.Gamma();
        a.Gamma_c = control.Gamma();
        return a;
    }

    EnvironmentTerm environment_term() const {
        return environment ? EnvironmentTerm::from(mirror, *environment) : EnvironmentTerm{};
    }
};

struct PointEvaluation {
    cplx mu_p{};
    cplx mu_c{};
    cplx J_plus{};   // NaN under η overrides
    cplx J_minus{};
    cplx eta_plus{};
    cplx eta_minus{};
    CoolingRates rates;
    SteadyOccupation n_ss = SteadyOccupation::divergent();
    bool include_env = false;
    double dark_residual = std::numeric_limits<double>::quiet_NaN();
};

inline PointEvaluation evaluate(const Scenario& s) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    PointEvaluation out;
    out.mu_p = optomech_coupling(s.probe, s.mirror);
    out.mu_c = optomech_coupling(s.control, s.mirror);
    out.include_env = s.environment.has_value();
    const EnvironmentTerm env = s.environment_term();
    const double nu = s.mirror.nu();
    const AtomParams atom = s.atom();

    if (s.overrides) {
        out.J_plus = out.J_minus = cplx(nan, nan);
        out.eta_plus = s.overrides->eta_plus;
        out.eta_minus = s.overrides->eta_minus;
        out.rates = assemble_rates(out.mu_p, out.mu_c, out.eta_plus, out.eta_minus, s.cloud.phase(), env);
    } else {
        const auto N = s.cloud.n_atoms();
        if (atom.rabi_sq_sum() > 0.0) {
            out.J_plus = spectral_factor(nu, atom).value;
            out.J_minus = spectral_factor(-nu, atom).value;
        } else if (N > 0) {
            throw InputError("evaluate: atoms present but both Rabi frequencies vanish");
        } else {
            out.J_plus = out.J_minus = cplx(nan, nan);
        }
        ChainInputs chain;
        chain.n_atoms = N;
        chain.alpha_p = s.probe.amplitude();
        chain.alpha_c = s.control.amplitude();
        chain.J_plus = N > 0 ? out.J_plus : cplx{};
        chain.J_minus = N > 0 ? out.J_minus : cplx{};
        chain.mu_c = out.mu_c;
        chain.phase = s.cloud.phase();
        out.eta_plus = chain.eta(Branch::blue);
        out.eta_minus = chain.eta(Branch::red);
        if (chain.equal_amplitudes()) {
            out.rates = assemble_rates(out.mu_p, out.mu_c, out.eta_plus, out.eta_minus, s.cloud.phase(), env);
        } else {
            out.rates = assemble_rates_exact(out.mu_p, chain, env);
        }
    }
    out.n_ss = steady_state_occupation(out.rates, out.include_env);

    if (atom.rabi_sq_sum() > 0.0 && !s.overrides) {
        try {
            out.dark_residual = bare_steady_state(build_bloch(atom)).max_optical_coherence();
        } catch (const NumericalError&) {
        }
    }
    return out;
}

}  // namespace optocool
