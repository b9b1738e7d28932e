#pragma once

// Physical parameter records and the coupling constants derived from them.
// Everything is strict SI: rad/s for angular frequencies and rates, W, kg, m, K.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>

#include "optocool/errors.hpp"

namespace optocool {

/// CODATA 2018 exact / recommended values.
struct PhysicalConstants {
    static constexpr double c = 299792458.0;
    static constexpr double hbar = 1.054571817e-34;
    static constexpr double kB = 1.380649e-23;
};

inline constexpr double kPi = std::numbers::pi;

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw InputError(message);
}

inline bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }
inline bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace detail

/// Drive amplitude |α̃| from CW power.
inline double amplitude_from_power(double power, double omega0) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw std::domain_error("amplitude_from_power: omega0 must be positive");
    if (!detail::finite_nonneg(power))
        throw std::domain_error("amplitude_from_power: power must be non-negative");
    using K = PhysicalConstants;
    return std::sqrt(2.0 * kPi * power / (K::c * K::hbar * omega0));
}

/// Inverse of amplitude_from_power.
inline double power_from_amplitude(double amplitude, double omega0) {
    if (!(omega0 > 0.0) || !std::isfinite(omega0))
        throw std::domain_error("power_from_amplitude: omega0 must be positive");
    if (!detail::finite_nonneg(amplitude))
        throw std::domain_error("power_from_amplitude: amplitude must be non-negative");
    using K = PhysicalConstants;
    return amplitude * amplitude * K::c * K::hbar * omega0 / (2.0 * kPi);
}

/// Fundamental mechanical mode of the mirror.
class MirrorSpec {
public:
    /// nu in rad/s, mass in kg, quality dimensionless.
    MirrorSpec(double nu, double mass, double quality) : nu_(nu), mass_(mass), quality_(quality) {
        detail::require(detail::finite_pos(nu), "mirror: nu must be positive");
        detail::require(detail::finite_pos(mass), "mirror: mass must be positive");
        detail::require(detail::finite_pos(quality), "mirror: quality must be positive");
    }

    double nu() const noexcept { return nu_; }
    double mass() const noexcept { return mass_; }
    double quality() const noexcept { return quality_; }

    /// Zero-point position fluctuation sqrt(hbar / (2 m nu)).
    double q0() const noexcept { return std::sqrt(PhysicalConstants::hbar / (2.0 * mass_ * nu_)); }

    /// Environmental damping rate nu / Q.
    double env_rate() const noexcept { return nu_ / quality_; }

private:
    double nu_;
    double mass_;
    double quality_;
};

/// One classical CW drive and the two decay channels of the transition it addresses.
///
/// The amplitude is real and non-negative; the position phases only enter through
/// the Rabi frequencies seen by individual atoms.
class DriveSpec {
public:
    static DriveSpec from_amplitude(double omega0, double amplitude, double gamma, double Gamma) {
        return DriveSpec(omega0, amplitude, gamma, Gamma);
    }

    static DriveSpec from_power(double omega0, double power, double gamma, double Gamma) {
        detail::require(detail::finite_pos(omega0), "drive: omega0 must be positive");
        detail::require(detail::finite_nonneg(power), "drive: power must be non-negative");
        return DriveSpec(omega0, amplitude_from_power(power, omega0), gamma, Gamma);
    }

    double omega0() const noexcept { return omega0_; }
    double amplitude() const noexcept { return amplitude_; }
    double power() const { return power_from_amplitude(amplitude_, omega0_); }
    /// Decay rate into this drive's radiation continuum.
    double gamma() const noexcept { return gamma_; }
    /// Spontaneous decay rate into the independent bath channel.
    double Gamma() const noexcept { return Gamma_; }
    double wavenumber() const noexcept { return omega0_ / PhysicalConstants::c; }

private:
    DriveSpec(double omega0, double amplitude, double gamma, double Gamma)
        : omega0_(omega0), amplitude_(amplitude), gamma_(gamma), Gamma_(Gamma) {
        detail::require(detail::finite_pos(omega0), "drive: omega0 must be positive");
        detail::require(detail::finite_nonneg(amplitude), "drive: amplitude must be non-negative");
        detail::require(detail::finite_nonneg(gamma), "drive: gamma must be non-negative");
        detail::require(detail::finite_nonneg(Gamma), "drive: Gamma must be non-negative");
    }

    double omega0_;
    double amplitude_;
    double gamma_;
    double Gamma_;
};

/// Atom cloud: size, common detuning (Δ_g = Δ_e), mean distance and the round-trip phase e^{iντ}.
///
/// The phase is carried explicitly. For kHz oscillators ντ is a huge number of radians, so
/// evaluating exp(i ν τ) from xbar in floating point is meaningless; designed placements
/// store exactly ±1 and free placements take the phase from the caller.
class AtomCloudSpec {
public:
    AtomCloudSpec(std::int64_t n_atoms, double xbar, double delta, std::complex<double> phase)
        : n_atoms_(n_atoms), xbar_(xbar), delta_(delta), phase_(phase) {
        detail::require(n_atoms >= 0, "cloud: n_atoms must be non-negative");
        detail::require(detail::finite_nonneg(xbar), "cloud: xbar must be non-negative");
        detail::require(std::isfinite(delta), "cloud: delta must be finite");
        detail::require(std::isfinite(phase.real()) && std::isfinite(phase.imag()) &&
                            std::abs(std::abs(phase) - 1.0) < 1e-12,
                        "cloud: placement phase must have unit modulus");
    }

    std::int64_t n_atoms() const noexcept { return n_atoms_; }
    double xbar() const noexcept { return xbar_; }
    double delta() const noexcept { return delta_; }
    std::complex<double> phase() const noexcept { return phase_; }
    /// Round-trip light travel time 2 xbar / c.
    double tau() const noexcept { return 2.0 * xbar_ / PhysicalConstants::c; }

private:
    std::int64_t n_atoms_;
    double xbar_;
    double delta_;
    std::complex<double> phase_;
};

/// Thermal bath of the mirror.
class EnvironmentSpec {
public:
    explicit EnvironmentSpec(double temperature) : temperature_(temperature) {
        detail::require(detail::finite_nonneg(temperature), "environment: temperature must be non-negative");
    }

    double temperature() const noexcept { return temperature_; }

private:
    double temperature_;
};

/// Optomechanical coupling mu = 2 sqrt(c / 2π) (omega0 / c) q0 |α̃|.
inline std::complex<double> optomech_coupling(const DriveSpec& drive, const MirrorSpec& mirror) {
    const double c = PhysicalConstants::c;
    return 2.0 * std::sqrt(c / (2.0 * kPi)) * drive.wavenumber() * mirror.q0() * drive.amplitude();
}

/// Bare Rabi frequency sqrt(2 c γ / π) |α̃| (no position phase).
inline double rabi_frequency(const DriveSpec& drive) {
    return std::sqrt(2.0 * PhysicalConstants::c * drive.gamma() / kPi) * drive.amplitude();
}

/// Amplitude that produces the Rabi frequency `rabi` on a channel with decay rate gamma.
inline double amplitude_for_rabi(double rabi, double gamma) {
    if (!(gamma > 0.0)) throw InputError("amplitude_for_rabi: gamma must be positive");
    if (!detail::finite_nonneg(rabi)) throw InputError("amplitude_for_rabi: rabi must be non-negative");
    return rabi / std::sqrt(2.0 * PhysicalConstants::c * gamma / kPi);
}

/// Thermal phonon number kB T / (hbar nu).
inline double thermal_occupation(double temperature, const MirrorSpec& mirror) {
    detail::require(detail::finite_nonneg(temperature), "thermal_occupation: temperature must be non-negative");
    return PhysicalConstants::kB * temperature / (PhysicalConstants::hbar * mirror.nu());
}

inline double thermal_occupation(const EnvironmentSpec& env, const MirrorSpec& mirror) {
    return thermal_occupation(env.temperature(), mirror);
}

}  // namespace optocool
