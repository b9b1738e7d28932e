#include <gtest/gtest.h>

#include <cmath>

#include "optocool/chain.hpp"

using namespace optocool;

namespace {

ChainInputs sample(std::int64_t n, double coupling, cplx phase = {1.0, 0.0}) {
    // Re J < 0 on both sidebands, as for any physical spectral factor.
    const cplx J_minus = coupling * std::polar(1.0, 2.2);
    const cplx J_plus = coupling * std::polar(1.0, -2.5);
    return ChainInputs::equal_drive(n, 1.0, J_plus, J_minus, cplx(20.0, 0.0), phase, 3.0);
}

cplx exact_boundary(const ChainInputs& in, Branch b) {
    const double N = static_cast<double>(in.n_atoms);
    const cplx x = in.alpha_p * in.alpha_c * in.spectral(b);
    const cplx src = cplx(0.0, 1.0) * in.branch_phase(b) * (in.mu_c / 2.0) * x * in.source_occupation(b);
    return -N * src / (1.0 - N * x + x);
}

}  // namespace

TEST(Chain, RecurrenceCoefficients) {
    ChainInputs in = sample(3, 0.1);
    in.alpha_p = 2.0;
    in.alpha_c = 3.0;
    const StepMap m = recurrence_coefficients(in, Branch::red);
    EXPECT_EQ(m.A(0, 0), 1.0 + 9.0 * in.J_minus);
    EXPECT_EQ(m.A(1, 1), 1.0 + 4.0 * in.J_minus);
    EXPECT_EQ(m.A(0, 1), -6.0 * in.J_minus);
    EXPECT_EQ(m.A(1, 0), m.A(0, 1));
}

TEST(Chain, ExactMatchesBoundaryFormula) {
    for (std::int64_t n : {1, 2, 7, 100, 1000}) {
        for (Branch b : {Branch::red, Branch::blue}) {
            const ChainInputs in = sample(n, 3e-3, {-1.0, 0.0});
            const cplx ref = exact_boundary(in, b);
            const cplx got = solve_chain_exact(in, b).boundary();
            EXPECT_LT(std::abs(got - ref), 1e-12 * std::abs(ref)) << "N = " << n;
        }
    }
}

TEST(Chain, SingleAtom) {
    const ChainInputs in = sample(1, 0.2);
    const ChainBranchSolution s = solve_chain_exact(in, Branch::red);
    const StepMap m = recurrence_coefficients(in, Branch::red);
    EXPECT_LT(std::abs(s.Ap[0] - m.source(0)), 1e-15);
    EXPECT_LT(std::abs(s.Ac[1] - m.source(1)), 1e-15);
    EXPECT_EQ(s.Ap[1], cplx(0.0));
    EXPECT_EQ(s.Ac[0], cplx(0.0));
}

TEST(Chain, NoAtoms) {
    const ChainInputs in = sample(0, 0.2);
    EXPECT_EQ(solve_chain_exact(in, Branch::red).boundary(), cplx(0.0));
    EXPECT_EQ(solve_chain_closed_form(in, Branch::red), cplx(0.0));
}

TEST(Chain, TransferOracleAgrees) {
    for (Branch b : {Branch::red, Branch::blue}) {
        ChainInputs in = sample(400, 1e-3, std::polar(1.0, 0.7));
        in.alpha_c = 1.3;
        const auto exact = solve_chain_exact(in, b);
        const auto shoot = solve_chain_transfer(in, b);
        for (std::size_t k = 0; k < exact.Ap.size(); ++k) {
            EXPECT_LT(std::abs(exact.Ap[k] - shoot.Ap[k]), 1e-10 * std::abs(exact.Ap.front()));
            EXPECT_LT(std::abs(exact.Ac[k] - shoot.Ac[k]), 1e-10 * std::abs(exact.Ap.front()));
        }
    }
}

TEST(Chain, ConservedAlongChain) {
    for (double ac : {1.0, 0.6}) {
        for (Branch b : {Branch::red, Branch::blue}) {
            ChainInputs in = sample(300, 2e-3);
            in.alpha_c = ac;
            const auto s = solve_chain_exact(in, b);
            const cplx q0 = in.alpha_p * s.Ap[0] - in.alpha_c * s.Ac[0];
            for (std::size_t k = 1; k < s.Ap.size(); ++k) {
                const cplx q = in.alpha_p * s.Ap[k] - in.alpha_c * s.Ac[k];
                EXPECT_LT(std::abs(q - q0), 1e-12 * std::abs(q0));
            }
        }
    }
}

TEST(Chain, ClosedFormConvergesAsOneOverN) {
    const cplx eta_target = 0.4 * std::polar(1.0, 2.2);
    double prev = 0.0;
    for (std::int64_t n : {50, 100, 200, 400}) {
        ChainInputs in = sample(n, 1.0);
        in.J_minus = eta_target / static_cast<double>(n);
        const cplx closed = solve_chain_closed_form(in, Branch::red);
        const cplx exact = solve_chain_exact(in, Branch::red).boundary();
        const double dev = std::abs(closed - exact) / std::abs(exact);
        if (prev > 0.0) EXPECT_NEAR(prev / dev, 2.0, 0.05);
        prev = dev;
    }
}

TEST(Chain, ClosedFormErrors) {
    ChainInputs in = sample(10, 0.1);
    in.alpha_c = 2.0;
    EXPECT_THROW(solve_chain_closed_form(in, Branch::red), InputError);
    ChainInputs pole = sample(10, 1.0);
    pole.J_minus = 0.1;
    EXPECT_THROW(solve_chain_closed_form(pole, Branch::red), PoleError);
    ChainInputs bad = sample(-1, 0.1);
    EXPECT_THROW(solve_chain_exact(bad, Branch::red), InputError);
}

TEST(Chain, BranchSources) {
    const ChainInputs in = sample(5, 0.1, std::polar(1.0, 0.4));
    EXPECT_EQ(in.source_occupation(Branch::red), 4.0);
    EXPECT_EQ(in.source_occupation(Branch::blue), 3.0);
    EXPECT_EQ(in.branch_phase(Branch::red), std::conj(in.phase));
    EXPECT_EQ(in.eta(Branch::blue), 5.0 * in.J_plus);
}
