#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "optocool/atom.hpp"
#include "optocool/cooling.hpp"

using namespace optocool;

namespace {

constexpr double kNu = 1.0;

struct Draw {
    cplx J_plus, J_minus;
    double alpha_sq;
};

Draw random_draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> om(0.5, 6.0), det(-10.0, 10.0), g(1e-4, 1e-2), G(0.05, 0.5);
    const double Op = om(rng), Oc = om(rng), delta = det(rng), gp = g(rng), gc = g(rng), Gp = G(rng), Gc = G(rng);
    Draw d;
    d.J_plus = spectral_factor(kNu, Op, Oc, delta, gp, gc, Gp, Gc).value;
    d.J_minus = spectral_factor(-kNu, Op, Oc, delta, gp, gc, Gp, Gc).value;
    d.alpha_sq = std::uniform_real_distribution<double>(1e-6, 1e-2)(rng) / std::abs(d.J_plus + d.J_minus);
    return d;
}

}  // namespace

TEST(Rates, SignDichotomy) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> mu(1.0, 30.0);
    std::uniform_int_distribution<std::int64_t> n(1, 100000);
    for (int trial = 0; trial < 100; ++trial) {
        const Draw d = random_draw(rng);
        const cplx mp = mu(rng), mc = mu(rng);
        const double N = static_cast<double>(n(rng));
        const cplx ep = N * d.alpha_sq * d.J_plus, em = N * d.alpha_sq * d.J_minus;
        const CoolingRates bs = assemble_rates(mp, mc, ep, em, {1.0, 0.0});
        EXPECT_LT(bs.LambdaPlus, 0.0);
        EXPECT_GT(bs.LambdaMinus, 0.0);
        const CoolingRates tms = assemble_rates(mp, mc, ep, em, {-1.0, 0.0});
        EXPECT_GT(tms.LambdaPlus, 0.0);
        EXPECT_LT(tms.LambdaMinus, 0.0);
        EXPECT_EQ(bs.N0, (std::norm(mp) + std::norm(mc)) / 2.0);
    }
}

TEST(Rates, ExactSolveApproachesClosedForm) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        const Draw d = random_draw(rng);
        const std::int64_t N = 20000;
        const cplx mp(3.0, 0.0), mc(2.0, 0.0);
        const ChainInputs in = ChainInputs::equal_drive(N, d.alpha_sq, d.J_plus, d.J_minus, mc, {-1.0, 0.0}, 0.0);
        const CoolingRates exact = assemble_rates_exact(mp, in);
        const CoolingRates closed =
            assemble_rates(mp, mc, in.eta(Branch::blue), in.eta(Branch::red), in.phase);
        EXPECT_NEAR(exact.LambdaPlus, closed.LambdaPlus, 1e-3 * std::abs(closed.LambdaPlus));
        EXPECT_NEAR(exact.LambdaMinus, closed.LambdaMinus, 1e-3 * std::abs(closed.LambdaMinus));
        EXPECT_EQ(exact.N0, closed.N0);
    }
}

TEST(Rates, ExactSolveIndependentOfOccupation) {
    std::mt19937_64 rng(43);
    const Draw d = random_draw(rng);
    ChainInputs in = ChainInputs::equal_drive(50, d.alpha_sq, d.J_plus, d.J_minus, 2.0, {1.0, 0.0}, 0.0);
    in.alpha_c *= 1.5;
    const CoolingRates a = assemble_rates_exact(2.0, in);
    in.n_occ = 17.0;
    const CoolingRates b = assemble_rates_exact(2.0, in);
    EXPECT_EQ(a.LambdaPlus, b.LambdaPlus);
    EXPECT_EQ(a.LambdaMinus, b.LambdaMinus);
}

TEST(Rates, PoleRejected) {
    EXPECT_THROW(assemble_rates(1.0, 1.0, 1.0, 0.0, 1.0), PoleError);
    EXPECT_THROW(assemble_rates(1.0, 1.0, 0.0, 1.0, 1.0), PoleError);
}

TEST(Steady, FormulaAndDivergence) {
    CoolingRates r;
    r.N0 = 2.0;
    r.LambdaPlus = -5.0;
    r.LambdaMinus = 1.0;
    const auto n = steady_state_occupation(r, false);
    ASSERT_TRUE(n.is_finite());
    EXPECT_DOUBLE_EQ(n.value(), 3.0 / 4.0);

    r.env_rate = 0.5;
    r.n_thermal = 100.0;
    EXPECT_DOUBLE_EQ(steady_state_occupation(r, true).value(), (3.0 + 50.0) / 4.5);

    r.LambdaPlus = 0.0;
    r.LambdaMinus = 0.0;
    const auto bare = steady_state_occupation(r, false);
    EXPECT_TRUE(bare.is_divergent());
    EXPECT_TRUE(std::isinf(bare.value_or_inf()));
    EXPECT_THROW(bare.value(), DivergenceError);
    EXPECT_DOUBLE_EQ(steady_state_occupation(r, true).value(), 1.0 / 0.5 * 2.0 + 100.0);
}

TEST(Steady, ManyAtomLimitFloors) {
    const cplx mp = 3.0, mc = 2.0;
    const CoolingRates bs = assemble_rates(mp, mc, -1e15, -1e-15, {1.0, 0.0});
    EXPECT_NEAR(steady_state_occupation(bs, false).value(), ideal_occupation(StrategyKind::bs_enhance, mp, mc), 1e-12);
    const CoolingRates tms = assemble_rates(mp, mc, 0.0, -1e15, {-1.0, 0.0});
    EXPECT_NEAR(steady_state_occupation(tms, false).value(), ideal_occupation(StrategyKind::tms_suppress, mp, mc),
                1e-12);
    EXPECT_EQ(ideal_occupation(StrategyKind::bs_enhance, 2.0, 2.0), 1.0);
    EXPECT_EQ(ideal_occupation(StrategyKind::tms_suppress, 2.0, 2.0), 0.0);
    EXPECT_GT(ideal_occupation(StrategyKind::bs_enhance, 2.0, 2.1), 1.0);
    EXPECT_THROW(ideal_occupation(StrategyKind::bs_enhance, 0.0, 2.0), InputError);
}

TEST(Evolve, ExactMatchesIntegrator) {
    CoolingRates r;
    r.N0 = 200.0;
    r.LambdaPlus = -450.0;
    r.LambdaMinus = 30.0;
    r.env_rate = 0.134;
    r.n_thermal = 6500.0;
    std::vector<double> t;
    for (int k = 0; k <= 50; ++k) t.push_back(k * 2e-4);
    const auto exact = evolve_occupation(6500.0, r, t);
    const auto numeric = evolve_occupation_numeric(6500.0, r, t);
    ASSERT_EQ(exact.n.size(), numeric.n.size());
    for (std::size_t k = 0; k < t.size(); ++k) EXPECT_NEAR(numeric.n[k] / exact.n[k], 1.0, 1e-9);
    EXPECT_FALSE(exact.growing);
}

TEST(Evolve, FlatAtSteadyState) {
    CoolingRates r;
    r.N0 = 2.0;
    r.LambdaPlus = -3.0;
    r.LambdaMinus = 0.5;
    const double nss = steady_state_occupation(r, false).value();
    const auto tr = evolve_occupation(nss, r, {0.0, 1.0, 10.0}, false);
    for (double n : tr.n) EXPECT_NEAR(n, nss, 1e-14);
}

TEST(Evolve, SinglePointAndErrors) {
    CoolingRates r;
    r.N0 = 1.0;
    const auto tr = evolve_occupation(5.0, r, {0.0});
    ASSERT_EQ(tr.n.size(), 1u);
    EXPECT_EQ(tr.n[0], 5.0);
    EXPECT_TRUE(tr.growing);
    EXPECT_DOUBLE_EQ(evolve_occupation(5.0, r, {0.0, 2.0}, false).n[1], 7.0);
    EXPECT_THROW(evolve_occupation(-1.0, r, {0.0}), InputError);
    EXPECT_THROW(evolve_occupation(1.0, r, {1.0, 0.0}), InputError);
}

TEST(Design, DetuningZeroesResonance) {
    const double nu = 2.0 * kPi * 32e3;
    for (double rabi : {0.5, 4.0, 9.0}) {
        const cplx Op = rabi * nu, Oc = 0.7 * rabi * nu;
        const double S = std::norm(Op) + std::norm(Oc);
        const double bs = design_detuning(StrategyKind::bs_enhance, Op, Oc, nu);
        EXPECT_LE(std::abs(4.0 * bs * nu - 4.0 * nu * nu + S), 1e-15 * S);
        const double tms = design_detuning(StrategyKind::tms_suppress, Op, Oc, nu);
        EXPECT_LE(std::abs(-4.0 * tms * nu - 4.0 * nu * nu + S), 1e-15 * S);
    }
    EXPECT_EQ(design_detuning(StrategyKind::bs_enhance, 4.0, 4.0, 1.0), -7.0);
    EXPECT_EQ(design_detuning(StrategyKind::tms_suppress, 4.0, 4.0, 1.0), 7.0);
    EXPECT_THROW(design_detuning(StrategyKind::bs_enhance, 1.0, 1.0, 0.0), InputError);
}

TEST(Design, Placement) {
    const double nu = 2.0 * kPi * 32e3;
    const Placement bs = design_position(StrategyKind::bs_enhance, nu, 0);
    EXPECT_EQ(bs.xbar, 0.0);
    EXPECT_EQ(bs.phase, cplx(1.0, 0.0));
    EXPECT_FALSE(bs.warning);
    const Placement tms = design_position(StrategyKind::tms_suppress, nu, 0);
    EXPECT_NEAR(tms.xbar, 2342.128578125, 1e-9);
    EXPECT_NEAR(tms.tau * nu, kPi, 1e-12);
    EXPECT_EQ(tms.phase, cplx(-1.0, 0.0));
    EXPECT_TRUE(tms.warning);
    const Placement far = design_position(StrategyKind::bs_enhance, nu, 3);
    EXPECT_NEAR(far.tau * nu, 6.0 * kPi, 1e-12);
    EXPECT_THROW(design_position(StrategyKind::bs_enhance, nu, -1), InputError);
}

TEST(Design, StrategyNames) {
    EXPECT_EQ(strategy_from_string("bs"), StrategyKind::bs_enhance);
    EXPECT_EQ(strategy_from_string("tms"), StrategyKind::tms_suppress);
    EXPECT_EQ(to_string(StrategyKind::tms_suppress), "tms");
    EXPECT_THROW(strategy_from_string("BS"), InputError);
}

TEST(FewAtoms, LinearisedRateMatchesClosedForm) {
    std::mt19937_64 rng(44);
    const Draw d = random_draw(rng);
    const cplx mp = 3.0, mc = 2.0;
    const std::int64_t N = 10;
    const double a2 = 1e-4 / (static_cast<double>(N) * std::abs(d.J_plus));
    const FewAtomRate lin = few_atom_rate(mp, mc, N, a2, d.J_plus, d.J_minus);
    const double Nd = static_cast<double>(N);
    const CoolingRates full = assemble_rates(mp, mc, Nd * a2 * d.J_plus, Nd * a2 * d.J_minus, {1.0, 0.0});
    // Linearisation error is |μ_p μ_c| O(|η|²) on each sideband term.
    const double ep = Nd * a2 * std::abs(d.J_plus), em = Nd * a2 * std::abs(d.J_minus);
    EXPECT_NEAR(lin.rate, full.net(), 2.0 * std::abs(mp * mc) * (ep * ep + em * em));
    EXPECT_FALSE(lin.outside_regime);
    EXPECT_TRUE(few_atom_rate(mp, mc, N, 1e4 * a2, d.J_plus, d.J_minus).outside_regime);
}
