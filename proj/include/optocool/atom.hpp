#pragma once

// Single Λ-atom dynamics: Bloch matrix, bare steady state, frequency-domain
// responses and the closed-form spectral factor J(ω).
//
// Basis order of the 8-entry operator vector (frozen):
//   0: σ_dd − σ_gg   1: σ_ge   2: σ_eg   3: σ_dd − σ_ee
//   4: σ_gd          5: σ_dg   6: σ_ed   7: σ_de

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

#include "optocool/errors.hpp"
#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;
using Matrix8c = Eigen::Matrix<cplx, 8, 8>;
using Vector8c = Eigen::Matrix<cplx, 8, 1>;
using Matrix8d = Eigen::Matrix<double, 8, 8>;

namespace basis {
inline constexpr int kDG = 0;  // σ_dd − σ_gg
inline constexpr int kGE = 1;
inline constexpr int kEG = 2;
inline constexpr int kDE4 = 3;  // σ_dd − σ_ee
inline constexpr int kGD = 4;
inline constexpr int kDG_ = 5;  // σ_dg
inline constexpr int kED = 6;
inline constexpr int kDE = 7;
}  // namespace basis

/// Parameters of one atom. Rabi frequencies may carry the per-atom position phase.
struct AtomParams {
    cplx Omega_p{};
    cplx Omega_c{};
    double delta_g = 0.0;
    double delta_e = 0.0;
    double gamma_p = 0.0;
    double gamma_c = 0.0;
    double Gamma_p = 0.0;
    double Gamma_c = 0.0;

    double total_decay() const noexcept { return gamma_p + Gamma_p + gamma_c + Gamma_c; }
    double rabi_sq_sum() const noexcept { return std::norm(Omega_p) + std::norm(Omega_c); }
};

/// d<σ>/dt = M <σ> + v.
struct BlochSystem {
    Matrix8c M;
    Vector8c v;
};

struct Populations {
    double gg;
    double ee;
    double dd;
};

struct SteadyState {
    Vector8c sigma;
    double residual = 0.0;
    double condition = 0.0;

    Populations populations() const {
        const double dd = (1.0 + sigma[basis::kDG].real() + sigma[basis::kDE4].real()) / 3.0;
        return {dd - sigma[basis::kDG].real(), dd - sigma[basis::kDE4].real(), dd};
    }

    /// Largest optical coherence |σ_gd|, |σ_dg|, |σ_ed|, |σ_de|; zero in a dark state.
    double max_optical_coherence() const {
        return std::max({std::abs(sigma[basis::kGD]), std::abs(sigma[basis::kDG_]),
                         std::abs(sigma[basis::kED]), std::abs(sigma[basis::kDE])});
    }
};

inline constexpr double kConditionLimit = 1e12;

namespace detail {

inline double condition_number(const Matrix8c& A) {
    Eigen::JacobiSVD<Matrix8c> svd(A);
    const auto& s = svd.singularValues();
    if (s[7] == 0.0) return std::numeric_limits<double>::infinity();
    return s[0] / s[7];
}

}  // namespace detail

/// Moment equations of one Λ atom driven by Probe (g↔d) and Control (e↔d).
inline BlochSystem build_bloch(const AtomParams& a) {
    const double rates[] = {a.gamma_p, a.gamma_c, a.Gamma_p, a.Gamma_c};
    for (double r : rates)
        detail::require(std::isfinite(r) && r >= 0.0, "build_bloch: decay rates must be non-negative");
    detail::require(std::isfinite(a.delta_g) && std::isfinite(a.delta_e), "build_bloch: detunings must be finite");
    if (a.total_decay() == 0.0 && a.rabi_sq_sum() == 0.0)
        throw SingularSystemError("build_bloch: no decay and no drive, steady state is not unique",
                                  std::numeric_limits<double>::infinity());

    const double G1 = (2.0 * a.gamma_p + 2.0 * a.Gamma_p + a.gamma_c + a.Gamma_c) / 3.0;
    const double G4 = (a.gamma_p + a.Gamma_p + 2.0 * a.gamma_c + 2.0 * a.Gamma_c) / 3.0;
    const double Gt = a.total_decay();
    const cplx Op = a.Omega_p, Oc = a.Omega_c;
    const cplx Opc = std::conj(Op), Occ = std::conj(Oc);
    const cplx I(0.0, 1.0);
    const double dd = a.delta_g - a.delta_e;

    using namespace basis;
    BlochSystem s;
    s.M.setZero();
    s.v.setZero();

    s.M(kDG, kDG) = -G1;
    s.M(kDG, kDE4) = -G1;
    s.M(kDG, kGD) = -Opc;
    s.M(kDG, kDG_) = -Op;
    s.M(kDG, kED) = -Occ / 2.0;
    s.M(kDG, kDE) = -Oc / 2.0;
    s.v[kDG] = -G1;

    s.M(kGE, kGE) = -I * dd;
    s.M(kGE, kGD) = Occ / 2.0;
    s.M(kGE, kDE) = Op / 2.0;

    s.M(kEG, kEG) = I * dd;
    s.M(kEG, kDG_) = Oc / 2.0;
    s.M(kEG, kED) = Opc / 2.0;

    s.M(kDE4, kDG) = -G4;
    s.M(kDE4, kDE4) = -G4;
    s.M(kDE4, kGD) = -Opc / 2.0;
    s.M(kDE4, kDG_) = -Op / 2.0;
    s.M(kDE4, kED) = -Occ;
    s.M(kDE4, kDE) = -Oc;
    s.v[kDE4] = -G4;

    // σ_gd picks up −iΔ_g from −Δ_g σ_gg in the atomic Hamiltonian (same sign as σ_ed).
    s.M(kGD, kDG) = Op / 2.0;
    s.M(kGD, kGE) = -Oc / 2.0;
    s.M(kGD, kGD) = -I * a.delta_g - Gt / 2.0;

    s.M(kDG_, kDG) = Opc / 2.0;
    s.M(kDG_, kEG) = -Occ / 2.0;
    s.M(kDG_, kDG_) = I * a.delta_g - Gt / 2.0;

    s.M(kED, kEG) = -Op / 2.0;
    s.M(kED, kDE4) = Oc / 2.0;
    s.M(kED, kED) = -I * a.delta_e - Gt / 2.0;

    s.M(kDE, kGE) = -Opc / 2.0;
    s.M(kDE, kDE4) = Occ / 2.0;
    s.M(kDE, kDE) = I * a.delta_e - Gt / 2.0;
    return s;
}

/// Solves M σ + v = 0 by LU with partial pivoting. Throws SingularSystemError when cond(M) > 1e12.
inline SteadyState bare_steady_state(const BlochSystem& sys) {
    const double cond = detail::condition_number(sys.M);
    if (!(cond <= kConditionLimit)) {
        std::ostringstream os;
        os << "bare_steady_state: Bloch matrix is singular (condition estimate " << cond << ")";
        throw SingularSystemError(os.str(), cond);
    }
    SteadyState ss;
    ss.sigma = sys.M.partialPivLu().solve(-sys.v);
    ss.condition = cond;
    const double scale = sys.M.norm() * ss.sigma.norm() + sys.v.norm();
    ss.residual = scale > 0.0 ? (sys.M * ss.sigma + sys.v).norm() / scale : 0.0;
    return ss;
}

/// Dark-state amplitudes (c_g, c_e) with |DS> = c_g|g> + c_e|e>.
inline std::pair<cplx, cplx> dark_state_amplitudes(cplx Omega_p, cplx Omega_c) {
    const double norm = std::sqrt(std::norm(Omega_p) + std::norm(Omega_c));
    if (norm == 0.0) throw InputError("dark_state_amplitudes: both Rabi frequencies vanish");
    return {Omega_c / norm, -Omega_p / norm};
}

/// Commutator maps in the 8-entry basis: M_y σ⃗ = [σ_y, σ⃗].
struct TransformationMatrices {
    Matrix8d M_pd;  // [σ_gd, ·]
    Matrix8d M_p;   // [σ_dg, ·]
    Matrix8d M_cd;  // [σ_ed, ·]
    Matrix8d M_c;   // [σ_de, ·]
};

inline const TransformationMatrices& transformation_matrices() {
    static const TransformationMatrices t = [] {
        TransformationMatrices m;
        m.M_pd.setZero();
        m.M_p.setZero();
        m.M_cd.setZero();
        m.M_c.setZero();
        // rows/cols 0-based
        m.M_pd(0, 4) = 2;
        m.M_pd(2, 6) = -1;
        m.M_pd(3, 4) = 1;
        m.M_pd(5, 0) = -1;
        m.M_pd(7, 1) = 1;

        m.M_p(0, 5) = -2;
        m.M_p(1, 7) = 1;
        m.M_p(3, 5) = -1;
        m.M_p(4, 0) = 1;
        m.M_p(6, 2) = -1;

        m.M_cd(0, 6) = 1;
        m.M_cd(1, 4) = -1;
        m.M_cd(3, 6) = 2;
        m.M_cd(5, 2) = 1;
        m.M_cd(7, 3) = -1;

        m.M_c(0, 7) = -1;
        m.M_c(2, 5) = 1;
        m.M_c(3, 7) = -2;
        m.M_c(4, 1) = -1;
        m.M_c(6, 3) = 1;
        return m;
    }();
    return t;
}

enum class Channel { p, pd, c, cd };
enum class Projector { gd, ed };

inline const Matrix8d& channel_matrix(Channel ch) {
    const auto& t = transformation_matrices();
    switch (ch) {
        case Channel::p: return t.M_p;
        case Channel::pd: return t.M_pd;
        case Channel::c: return t.M_c;
        case Channel::cd: return t.M_cd;
    }
    return t.M_p;
}

/// 2π û · (−(iω + M)^{-1}) M_channel σ_DS, i.e. G_y (projector gd) or F_y (projector ed).
inline cplx resolvent_response(const BlochSystem& sys, const SteadyState& ss, double omega, Channel channel,
                               Projector projector) {
    const Matrix8c A = cplx(0.0, omega) * Matrix8c::Identity() + sys.M;
    const double cond = detail::condition_number(A);
    if (!(cond <= kConditionLimit)) {
        Eigen::ComplexEigenSolver<Matrix8c> es(sys.M, false);
        cplx nearest = es.eigenvalues()[0];
        for (int k = 1; k < 8; ++k)
            if (std::abs(es.eigenvalues()[k] + cplx(0.0, omega)) < std::abs(nearest + cplx(0.0, omega)))
                nearest = es.eigenvalues()[k];
        std::ostringstream os;
        os << "resolvent_response: iω + M is singular at ω = " << omega << " (eigenvalue " << nearest << ")";
        throw PoleError(os.str(), nearest);
    }
    const Vector8c rhs = channel_matrix(channel).cast<cplx>() * ss.sigma;
    const Vector8c x = -A.partialPivLu().solve(rhs);
    const int k = projector == Projector::gd ? basis::kGD : basis::kED;
    return 2.0 * kPi * x[k];
}

struct SpectralFactor {
    cplx value;
    double omega;
};

/// Closed-form spectral factor
///   J(ω) = (γ_p γ_c / 2π) · 16 i ω c / [S (−2iωΓ̃ + 4Δω − 4ω² + S)],  S = |Ω_p|² + |Ω_c|².
inline SpectralFactor spectral_factor(double omega, cplx Omega_p, cplx Omega_c, double delta, double gamma_p,
                                      double gamma_c, double Gamma_p, double Gamma_c) {
    const double S = std::norm(Omega_p) + std::norm(Omega_c);
    if (!(S > 0.0)) throw InputError("spectral_factor: |Omega_p|^2 + |Omega_c|^2 must be positive");
    if (std::abs(omega) < 1e-15 * std::sqrt(S)) return {cplx(0.0, 0.0), omega};
    const double Gt = gamma_p + Gamma_p + gamma_c + Gamma_c;
    const cplx denom = cplx(4.0 * delta * omega - 4.0 * omega * omega + S, -2.0 * omega * Gt);
    if (std::abs(denom) <= 1e-15 * S) throw PoleError("spectral_factor: denominator vanishes", cplx(omega, 0.0));
    const cplx num = cplx(0.0, 16.0 * omega * PhysicalConstants::c) * (gamma_p * gamma_c / (2.0 * kPi));
    return {num / (S * denom), omega};
}

inline SpectralFactor spectral_factor(double omega, const AtomParams& a) {
    return spectral_factor(omega, a.Omega_p, a.Omega_c, a.delta_g, a.gamma_p, a.gamma_c, a.Gamma_p, a.Gamma_c);
}

/// The closed-form counterpart of resolvent_response at Δ_g = Δ_e, including the position
/// phases carried by the Rabi frequencies. Requires γ_p, γ_c > 0 (amplitudes are recovered
/// from Ω = sqrt(2cγ/π) α̃).
inline cplx closed_form_response(const AtomParams& a, double omega, Channel channel, Projector projector) {
    if (channel == Channel::pd || channel == Channel::cd) return {0.0, 0.0};
    detail::require(a.gamma_p > 0.0 && a.gamma_c > 0.0, "closed_form_response: gamma_p and gamma_c must be positive");
    const cplx J = spectral_factor(omega, a).value;
    const double c = PhysicalConstants::c;
    const double alpha_p = std::abs(a.Omega_p) / std::sqrt(2.0 * c * a.gamma_p / kPi);
    const double alpha_c = std::abs(a.Omega_c) / std::sqrt(2.0 * c * a.gamma_c / kPi);
    // e^{-iφ_p} and e^{iφ_c} are the phases of the per-atom Rabi frequencies.
    const cplx ph_p = std::abs(a.Omega_p) > 0.0 ? a.Omega_p / std::abs(a.Omega_p) : cplx(1.0);
    const cplx ph_c = std::abs(a.Omega_c) > 0.0 ? a.Omega_c / std::abs(a.Omega_c) : cplx(1.0);
    const double cross = 2.0 * kPi / std::sqrt(a.gamma_p * a.gamma_c);
    if (projector == Projector::gd) {
        if (channel == Channel::p) return alpha_c * alpha_c * (2.0 * kPi / a.gamma_p) * J;
        return -(ph_p * std::conj(ph_c)) * alpha_p * alpha_c * cross * J;  // e^{-i(φ_p+φ_c)}
    }
    if (channel == Channel::c) return alpha_p * alpha_p * (2.0 * kPi / a.gamma_c) * J;
    return -(std::conj(ph_p) * ph_c) * alpha_p * alpha_c * cross * J;  // e^{+i(φ_p+φ_c)}
}

}  // namespace optocool
