#pragma once

// Phonon-occupation rate equation
//
//   dn/dt = N0 + Λ₊ n + Λ₋ (n + 1) + (ν/Q)(N_th − n)
//
// its steady state, exact time evolution, and the two cooling strategies.

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "optocool/chain.hpp"
#include "optocool/errors.hpp"
#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;

struct EnvironmentTerm {
    double rate = 0.0;       // ν / Q
    double n_thermal = 0.0;  // kB T / (ħ ν)

    static EnvironmentTerm from(const MirrorSpec& mirror, const EnvironmentSpec& env) {
        return {mirror.env_rate(), thermal_occupation(env, mirror)};
    }
};

struct CoolingRates {
    double N0 = 0.0;
    double LambdaPlus = 0.0;
    double LambdaMinus = 0.0;
    double env_rate = 0.0;
    double n_thermal = 0.0;

    double net() const noexcept { return LambdaPlus + LambdaMinus; }
    bool cooling() const noexcept { return net() < 0.0; }

    /// Linear coefficient λ and constant b of dn/dt = λ n + b.
    double linear(bool include_env) const noexcept { return net() - (include_env ? env_rate : 0.0); }
    double constant(bool include_env) const noexcept {
        return N0 + LambdaMinus + (include_env ? env_rate * n_thermal : 0.0);
    }
};

/// Rates from the closed-form chain solution:
///   Λ₊ = +Re(e^{+iντ} μ_p* μ_c η₊/(1−η₊)),  Λ₋ = −Re(e^{−iντ} μ_p* μ_c η₋/(1−η₋)).
inline CoolingRates assemble_rates(cplx mu_p, cplx mu_c, cplx eta_plus, cplx eta_minus, cplx phase,
                                   EnvironmentTerm env = {}) {
    if (std::abs(1.0 - eta_plus) <= 1e-9) throw PoleError("assemble_rates: eta_plus at the pole", eta_plus);
    if (std::abs(1.0 - eta_minus) <= 1e-9) throw PoleError("assemble_rates: eta_minus at the pole", eta_minus);
    const cplx mm = std::conj(mu_p) * mu_c;
    CoolingRates r;
    r.N0 = (std::norm(mu_p) + std::norm(mu_c)) / 2.0;
    r.LambdaPlus = std::real(phase * mm * eta_plus / (1.0 - eta_plus));
    r.LambdaMinus = -std::real(std::conj(phase) * mm * eta_minus / (1.0 - eta_minus));
    r.env_rate = env.rate;
    r.n_thermal = env.n_thermal;
    return r;
}

/// Rates from the exact banded chain solve (works for unequal drive amplitudes).
/// Boundary correlations are linear in their source occupation, so they are normalised per unit source.
inline CoolingRates assemble_rates_exact(cplx mu_p, const ChainInputs& in, EnvironmentTerm env = {}) {
    ChainInputs unit = in;
    unit.n_occ = 1.0;  // red source 2, blue source 1
    const cplx red = solve_chain_exact(unit, Branch::red).boundary() / 2.0;
    const cplx blue = solve_chain_exact(unit, Branch::blue).boundary();
    const cplx I(0.0, 1.0);
    CoolingRates r;
    r.N0 = (std::norm(mu_p) + std::norm(in.mu_c)) / 2.0;
    r.LambdaPlus = 2.0 * std::real(I * std::conj(mu_p) * blue);
    r.LambdaMinus = 2.0 * std::real(-I * std::conj(mu_p) * red);
    r.env_rate = env.rate;
    r.n_thermal = env.n_thermal;
    return r;
}

/// Steady-state phonon number, or the statement that none exists.
class SteadyOccupation {
public:
    static SteadyOccupation finite(double n) { return SteadyOccupation(false, n); }
    static SteadyOccupation divergent() { return SteadyOccupation(true, std::numeric_limits<double>::infinity()); }

    bool is_finite() const noexcept { return !divergent_; }
    bool is_divergent() const noexcept { return divergent_; }

    double value() const {
        if (divergent_) throw DivergenceError("steady state does not exist: occupation grows without bound");
        return n_;
    }

    /// n_ss, or +inf when divergent.
    double value_or_inf() const noexcept { return n_; }

private:
    SteadyOccupation(bool divergent, double n) : divergent_(divergent), n_(n) {}
    bool divergent_;
    double n_;
};

inline SteadyOccupation steady_state_occupation(const CoolingRates& rates, bool include_env) {
    const double lambda = rates.linear(include_env);
    if (!(lambda < 0.0)) return SteadyOccupation::divergent();
    return SteadyOccupation::finite(-rates.constant(include_env) / lambda);
}

struct Trajectory {
    std::vector<double> t;
    std::vector<double> n;
    double lambda = 0.0;   // linear coefficient; >= 0 means no relaxation
    bool growing = false;
};

namespace detail {

inline void require_ascending(const std::vector<double>& t_grid) {
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        require(std::isfinite(t_grid[k]), "evolve_occupation: time grid must be finite");
        if (k > 0) require(t_grid[k] >= t_grid[k - 1], "evolve_occupation: time grid must be ascending");
    }
}

}  // namespace detail

/// Exact solution of the scalar linear ODE, n(t) = n0 + (λ n0 + b) expm1(λ t)/λ, measured from t_grid[0].
inline Trajectory evolve_occupation(double n0, const CoolingRates& rates, const std::vector<double>& t_grid,
                                    bool include_env = true) {
    detail::require(std::isfinite(n0) && n0 >= 0.0, "evolve_occupation: n0 must be non-negative");
    detail::require_ascending(t_grid);
    const double lambda = rates.linear(include_env);
    const double b = rates.constant(include_env);
    Trajectory out;
    out.lambda = lambda;
    out.growing = !(lambda < 0.0);
    out.t = t_grid;
    out.n.reserve(t_grid.size());
    const double t0 = t_grid.empty() ? 0.0 : t_grid.front();
    for (double t : t_grid) {
        const double dt = t - t0;
        if (lambda == 0.0) {
            out.n.push_back(n0 + b * dt);
        } else {
            out.n.push_back(n0 + (lambda * n0 + b) * std::expm1(lambda * dt) / lambda);
        }
    }
    return out;
}

/// Adaptive Dormand–Prince integration of the same ODE; cross-check for evolve_occupation.
inline Trajectory evolve_occupation_numeric(double n0, const CoolingRates& rates, const std::vector<double>& t_grid,
                                            bool include_env = true, double rel_tol = 1e-12) {
    namespace odeint = boost::numeric::odeint;
    detail::require(std::isfinite(n0) && n0 >= 0.0, "evolve_occupation: n0 must be non-negative");
    detail::require_ascending(t_grid);
    Trajectory out;
    out.lambda = rates.linear(include_env);
    out.growing = !(out.lambda < 0.0);
    out.t = t_grid;
    if (t_grid.empty()) return out;

    const double lambda = out.lambda;
    const double b = rates.constant(include_env);
    auto rhs = [lambda, b](const double& n, double& dndt, double) { dndt = lambda * n + b; };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<double>>(rel_tol * 1e-3, rel_tol);
    double state = n0;
    const double span = t_grid.back() - t_grid.front();
    const double dt0 = span > 0.0 ? span * 1e-6 : 1.0;
    odeint::integrate_times(stepper, rhs, state, t_grid.begin(), t_grid.end(), dt0,
                            [&out](const double& n, double) { out.n.push_back(n); });
    return out;
}

enum class StrategyKind {
    bs_enhance,    // e^{iντ} = +1, detuning resonant with the blue sideband
    tms_suppress,  // e^{iντ} = −1, detuning resonant with the red sideband
};

struct StrategyChoice {
    StrategyKind kind = StrategyKind::tms_suppress;
    std::int64_t placement_index = 0;
};

inline std::string to_string(StrategyKind k) { return k == StrategyKind::bs_enhance ? "bs" : "tms"; }

inline StrategyKind strategy_from_string(const std::string& s) {
    if (s == "bs") return StrategyKind::bs_enhance;
    if (s == "tms") return StrategyKind::tms_suppress;
    throw InputError("unknown strategy '" + s + "' (expected 'bs' or 'tms')");
}

/// Detuning that zeroes the real part of the J denominator at +ν (BS) or −ν (TMS).
inline double design_detuning(StrategyKind kind, cplx Omega_p, cplx Omega_c, double nu) {
    detail::require(nu > 0.0 && std::isfinite(nu), "design_detuning: nu must be positive");
    const double S = std::norm(Omega_p) + std::norm(Omega_c);
    const double bs = (4.0 * nu * nu - S) / (4.0 * nu);
    return kind == StrategyKind::bs_enhance ? bs : -bs;
}

struct Placement {
    double xbar = 0.0;
    double tau = 0.0;
    cplx phase{1.0, 0.0};  // exactly ±1
    std::optional<std::string> warning;
};

/// Cloud distances beyond this need a delay line rather than free-space propagation.
inline constexpr double kFeasibleDistance = 10.0;

inline Placement design_position(StrategyKind kind, double nu, std::int64_t index) {
    detail::require(nu > 0.0 && std::isfinite(nu), "design_position: nu must be positive");
    detail::require(index >= 0, "design_position: placement index must be non-negative");
    const double c = PhysicalConstants::c;
    const double k = static_cast<double>(index) + (kind == StrategyKind::tms_suppress ? 0.5 : 0.0);
    Placement p;
    p.xbar = k * kPi * c / nu;
    p.tau = 2.0 * p.xbar / c;
    p.phase = kind == StrategyKind::tms_suppress ? cplx(-1.0, 0.0) : cplx(1.0, 0.0);
    if (p.xbar > kFeasibleDistance) {
        std::ostringstream os;
        os << "cloud distance " << p.xbar << " m exceeds " << kFeasibleDistance
           << " m; a free-space path of this length is impractical";
        p.warning = os.str();
    }
    return p;
}

struct FewAtomRate {
    double rate = 0.0;
    bool outside_regime = false;  // N |α̃|² |J(±ν)| > 0.1
};

/// Linearised net rate Λ₊ + Λ₋ ≈ N |α̃|² Re(μ_p* μ_c) Re(J(ν) − J(−ν)) at e^{iντ} = +1.
inline FewAtomRate few_atom_rate(cplx mu_p, cplx mu_c, std::int64_t n_atoms, double alpha_sq, cplx J_plus,
                                 cplx J_minus) {
    const double scale = static_cast<double>(n_atoms) * alpha_sq;
    FewAtomRate r;
    r.rate = scale * std::real(std::conj(mu_p) * mu_c * (J_plus - J_minus));
    r.outside_regime = scale * std::max(std::abs(J_plus), std::abs(J_minus)) > 0.1;
    return r;
}

/// Many-atom limit of n_ss for a strategy: (|μ_p|²+|μ_c|²)/(2μ_p*μ_c), minus one for TMS.
inline double ideal_occupation(StrategyKind kind, cplx mu_p, cplx mu_c) {
    const double cross = std::real(std::conj(mu_p) * mu_c);
    detail::require(cross > 0.0, "ideal_occupation: requires Re(mu_p* mu_c) > 0");
    const double bs = (std::norm(mu_p) + std::norm(mu_c)) / (2.0 * cross);
    return kind == StrategyKind::bs_enhance ? bs : bs - 1.0;
}

}  // namespace optocool
