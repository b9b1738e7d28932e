#pragma once

// Zero-frequency mirror–sideband correlations along the atom chain.
//
// For branch red (b̂) the unknowns are P_i = <b̂ A_p^(i)>_0 and C_i = <b̂ A_c^(i)>_0,
// for branch blue (b̂†) the b̂† counterparts, i = 1..N+1. One recurrence step links
//
//   [P_i, C_{i+1}]ᵀ = A · [P_{i+1}, C_i]ᵀ + s
//
// and the chain is closed by P_{N+1} = 0 (no atoms beyond the last one) and C_1 = 0
// (vacuum Control input correlation before the first atom).

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "optocool/errors.hpp"
#include "optocool/params.hpp"

namespace optocool {

using cplx = std::complex<double>;

enum class Branch {
    red,   // <b̂ ·>, sideband at −ν, source <b̂ b̂†> = n + 1
    blue,  // <b̂† ·>, sideband at +ν, source <b̂† b̂> = n
};

struct ChainInputs {
    std::int64_t n_atoms = 0;
    double alpha_p = 0.0;  // real, non-negative drive amplitudes
    double alpha_c = 0.0;
    cplx J_plus{};   // J(+ν)
    cplx J_minus{};  // J(−ν)
    cplx mu_c{};
    cplx phase{1.0, 0.0};  // e^{iντ}
    double n_occ = 0.0;

    /// Probe and Control with the same amplitude sqrt(alpha_sq).
    static ChainInputs equal_drive(std::int64_t n_atoms, double alpha_sq, cplx J_plus, cplx J_minus, cplx mu_c,
                                   cplx phase, double n_occ) {
        detail::require(alpha_sq >= 0.0, "chain: alpha_sq must be non-negative");
        const double a = std::sqrt(alpha_sq);
        return ChainInputs{n_atoms, a, a, J_plus, J_minus, mu_c, phase, n_occ};
    }

    void validate() const {
        detail::require(n_atoms >= 0, "chain: n_atoms must be non-negative");
        detail::require(alpha_p >= 0.0 && alpha_c >= 0.0, "chain: amplitudes must be non-negative");
        detail::require(n_occ >= 0.0 && std::isfinite(n_occ), "chain: n_occ must be non-negative");
    }

    bool equal_amplitudes() const noexcept {
        const double scale = std::max(alpha_p, alpha_c);
        return std::abs(alpha_p - alpha_c) <= 1e-12 * scale;
    }

    cplx spectral(Branch b) const noexcept { return b == Branch::red ? J_minus : J_plus; }

    /// Round-trip phase seen by the branch: e^{−iντ} (red) or e^{+iντ} (blue).
    cplx branch_phase(Branch b) const noexcept { return b == Branch::red ? std::conj(phase) : phase; }

    double source_occupation(Branch b) const noexcept { return b == Branch::red ? n_occ + 1.0 : n_occ; }

    /// Collective coupling η = N α_p α_c J(±ν).
    cplx eta(Branch b) const noexcept { return static_cast<double>(n_atoms) * alpha_p * alpha_c * spectral(b); }
};

struct StepMap {
    Eigen::Matrix2cd A;
    Eigen::Vector2cd source;
};

inline StepMap recurrence_coefficients(const ChainInputs& in, Branch branch) {
    in.validate();
    const cplx J = in.spectral(branch);
    const cplx ph = in.branch_phase(branch);
    const double s = in.source_occupation(branch);
    const double ap = in.alpha_p, ac = in.alpha_c;
    const cplx I(0.0, 1.0);

    StepMap m;
    m.A(0, 0) = 1.0 + ac * ac * J;
    m.A(0, 1) = -ap * ac * J;
    m.A(1, 0) = -ap * ac * J;
    m.A(1, 1) = 1.0 + ap * ap * J;
    m.source(0) = -I * ph * (in.mu_c / 2.0) * (ap * ac) * J * s;
    m.source(1) = I * ph * (in.mu_c / 2.0) * (ap * ap) * J * s;
    return m;
}

/// Correlations along one branch; Ap[k] and Ac[k] hold index i = k + 1.
struct ChainBranchSolution {
    Branch branch = Branch::red;
    std::vector<cplx> Ap;
    std::vector<cplx> Ac;
    double residual = 0.0;

    cplx boundary() const { return Ap.front(); }
};

/// Exact two-point boundary-value solve of the full recurrence (sparse LU on the banded system).
inline ChainBranchSolution solve_chain_exact(const ChainInputs& in, Branch branch) {
    const StepMap step = recurrence_coefficients(in, branch);
    const auto N = in.n_atoms;
    const Eigen::Index n = 2 * (N + 1);
    auto P = [](std::int64_t i) { return static_cast<Eigen::Index>(2 * (i - 1)); };
    auto C = [](std::int64_t i) { return static_cast<Eigen::Index>(2 * (i - 1) + 1); };

    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(6 * N + 2));
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    for (std::int64_t i = 1; i <= N; ++i) {
        const Eigen::Index r0 = 2 * (i - 1), r1 = r0 + 1;
        trip.emplace_back(r0, P(i), 1.0);
        trip.emplace_back(r0, P(i + 1), -step.A(0, 0));
        trip.emplace_back(r0, C(i), -step.A(0, 1));
        rhs[r0] = step.source(0);
        trip.emplace_back(r1, C(i + 1), 1.0);
        trip.emplace_back(r1, P(i + 1), -step.A(1, 0));
        trip.emplace_back(r1, C(i), -step.A(1, 1));
        rhs[r1] = step.source(1);
    }
    trip.emplace_back(n - 2, P(N + 1), 1.0);
    trip.emplace_back(n - 1, C(1), 1.0);

    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        std::ostringstream os;
        os << "solve_chain_exact: singular chain system (N = " << N << ", eta = " << in.eta(branch)
           << "): " << lu.lastErrorMessage();
        throw SingularSystemError(os.str(), std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXcd z = lu.solve(rhs);

    ChainBranchSolution out;
    out.branch = branch;
    const double scale = A.norm() * z.norm() + rhs.norm();
    out.residual = scale > 0.0 ? (A * z - rhs).norm() / scale : 0.0;
    if (!(out.residual < 1e-12)) {
        std::ostringstream os;
        os << "solve_chain_exact: residual " << out.residual << " too large (N = " << N << ")";
        throw SingularSystemError(os.str(), std::numeric_limits<double>::infinity());
    }
    out.Ap.resize(static_cast<std::size_t>(N + 1));
    out.Ac.resize(static_cast<std::size_t>(N + 1));
    for (std::int64_t i = 1; i <= N + 1; ++i) {
        out.Ap[static_cast<std::size_t>(i - 1)] = z[P(i)];
        out.Ac[static_cast<std::size_t>(i - 1)] = z[C(i)];
    }
    return out;
}

/// Forward shooting from the C_1 = 0 end. Independent of the banded solve; stable while the
/// per-atom coupling is small.
inline ChainBranchSolution solve_chain_transfer(const ChainInputs& in, Branch branch) {
    const StepMap step = recurrence_coefficients(in, branch);
    const auto N = static_cast<std::size_t>(in.n_atoms);
    if (step.A(0, 0) == cplx(0.0))
        throw SingularSystemError("solve_chain_transfer: degenerate step map", std::numeric_limits<double>::infinity());

    auto propagate = [&](cplx p1, std::vector<cplx>& P, std::vector<cplx>& C) {
        P.assign(N + 1, cplx{});
        C.assign(N + 1, cplx{});
        P[0] = p1;
        for (std::size_t k = 0; k < N; ++k) {
            P[k + 1] = (P[k] - step.A(0, 1) * C[k] - step.source(0)) / step.A(0, 0);
            C[k + 1] = step.A(1, 0) * P[k + 1] + step.A(1, 1) * C[k] + step.source(1);
        }
    };

    // The end value P_{N+1} is affine in P_1.
    std::vector<cplx> P0, C0, P1, C1;
    propagate(0.0, P0, C0);
    propagate(1.0, P1, C1);
    const cplx offset = P0.back();
    const cplx slope = P1.back() - P0.back();
    if (std::abs(slope) == 0.0)
        throw SingularSystemError("solve_chain_transfer: boundary condition cannot be met",
                                  std::numeric_limits<double>::infinity());
    const cplx p1 = -offset / slope;

    ChainBranchSolution out;
    out.branch = branch;
    propagate(p1, out.Ap, out.Ac);
    return out;
}

/// Leading-order closed form for the boundary correlation <b̂ A_p^(1)>_0 (red) or
/// <b̂† A_p^(1)>_0 (blue): −i e^{∓iντ} (μ_c/2) η/(1−η) · source occupation.
inline cplx solve_chain_closed_form(const ChainInputs& in, Branch branch) {
    in.validate();
    if (!in.equal_amplitudes())
        throw InputError("solve_chain_closed_form: requires equal Probe and Control amplitudes");
    const cplx eta = in.eta(branch);
    if (std::abs(1.0 - eta) < 1e-9) throw PoleError("solve_chain_closed_form: eta is at the pole eta = 1", eta);
    const cplx I(0.0, 1.0);
    return -I * in.branch_phase(branch) * (in.mu_c / 2.0) * (eta / (1.0 - eta)) * in.source_occupation(branch);
}

}  // namespace optocool
