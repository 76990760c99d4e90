#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "smlab/algebra.hpp"
#include "smlab/fields.hpp"

using namespace smlab;

namespace
{
using C = Complex;
constexpr double pi = std::numbers::pi;
C const I(0, 1);

Grid1D box(double dx = 0.04, double half = 8)
{
    return Grid1D::with_spacing(-half, half, dx);
}

WaveSolution ground(Grid1D const& g)
{
    return analytic_oracle(OracleKind::ho_ground, {}, g, {0.0});
}

RealField oscillator(Grid1D const& g)
{
    return harmonic_potential(g, 1, 1);
}

ComplexField random_field(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> dist;
    ComplexField f(static_cast<Eigen::Index>(n));
    for (auto& v : f)
        v = C(dist(rng), dist(rng));
    return f;
}

ComplexField gaussian(Grid1D const& g, double center = 0, double width = 1)
{
    return g.sample([&](double x) {
        return C(std::exp(-0.5 * (x - center) * (x - center) / (width * width)));
    });
}

//! max |a - b| over interior nodes with |x| < r.
double central_gap(Grid1D const& g, ComplexField const& a, ComplexField const& b, double r)
{
    double m = 0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
    {
        if (std::abs(g.x(i)) < r)
            m = std::max(m, std::abs(a[static_cast<Eigen::Index>(i)] - b[static_cast<Eigen::Index>(i)]));
    }
    return m;
}

DiffusionParams minus_branch()
{
    return continue_to_imaginary(params_from_nu(0.5), -1);
}

DiffusionParams plus_branch()
{
    return continue_to_imaginary(params_from_nu(0.5), +1);
}
}  // namespace

//---------------------------------------------------------------------------//
// SPACES
//---------------------------------------------------------------------------//

TEST(Space, Weights)
{
    auto g = box();
    auto l2 = build_space(g, SpaceKind::lebesgue);
    EXPECT_EQ(l2.weight.minCoeff(), 1);
    EXPECT_EQ(l2.weight.maxCoeff(), 1);

    auto ws = ground(g);
    auto h = build_space(g, SpaceKind::density, ws.rho(0).cast<C>());
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        double x = g.x(i);
        double expect = std::exp(-x * x) / std::sqrt(pi);
        if (expect > 1e-10)
            EXPECT_NEAR(h.weight[static_cast<Eigen::Index>(i)] / expect, 1, 1e-12);
        else
            EXPECT_GT(h.weight[static_cast<Eigen::Index>(i)], 0);
    }

    // Imaginary S_N leaves the phase weight at one.
    auto coh = analytic_oracle(OracleKind::ho_coherent, {.x0 = 1}, g, {0.7});
    auto si = build_space(g, SpaceKind::phase, normalized_phase(coh.S[0], minus_branch()));
    EXPECT_NEAR((si.weight.array() - 1).abs().maxCoeff(), 0, 1e-15);
}

TEST(Space, Rejections)
{
    auto g = box();
    EXPECT_THROW(build_space(g, SpaceKind::density, ComplexField::Zero(3)), InvalidInput);
    ComplexField neg = ComplexField::Constant(static_cast<Eigen::Index>(g.size()), -1);
    EXPECT_THROW(build_space(g, SpaceKind::density, neg), InvalidInput);
    ComplexField huge = ComplexField::Constant(static_cast<Eigen::Index>(g.size()), -1e4);
    EXPECT_THROW(build_space(g, SpaceKind::phase, huge), InvalidInput);
}

TEST(Space, InnerProductIsPositive)
{
    auto g = box();
    auto s = build_space(g, SpaceKind::density, ground(g).rho(0).cast<C>());
    std::mt19937_64 rng(3);
    auto f = random_field(rng, g.size());
    auto v = s.inner(f, f);
    EXPECT_GT(v.real(), 0);
    EXPECT_NEAR(v.imag(), 0, 1e-12);
    EXPECT_EQ(s.norm(ComplexField::Zero(static_cast<Eigen::Index>(g.size()))), 0);
}

//---------------------------------------------------------------------------//
// POSITION AND VELOCITY
//---------------------------------------------------------------------------//

TEST(Position, BasicProperties)
{
    auto g = box();
    auto s = build_space(g, SpaceKind::density, ground(g).rho(0).cast<C>());
    auto x = position_operator(s);
    ComplexField one = ComplexField::Ones(static_cast<Eigen::Index>(g.size()));
    EXPECT_NEAR((x.apply(one) - g.nodes().cast<C>()).cwiseAbs().maxCoeff(), 0, 0);

    std::mt19937_64 rng(1);
    auto f = random_field(rng, g.size());
    auto h = random_field(rng, g.size());
    EXPECT_NEAR(std::abs(s.inner(f, x.apply(h)) - s.inner(x.apply(f), h)), 0, 1e-12);
    EXPECT_EQ(commutator(x, x).m.cwiseAbs().maxCoeff(), 0);
}

TEST(Commutator, PositionShortcutMatchesProducts)
{
    auto g = box(0.1, 2);
    auto d = derivative_matrix(g);
    auto x = position_operator(build_space(g, SpaceKind::lebesgue));
    auto fast = commutator(d, x);
    OperatorMatrix xg = x;
    xg.kind = OperatorMatrix::Kind::general;
    auto slow = commutator(d, xg);
    EXPECT_LT((fast.m - slow.m).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((commutator(x, d).m + fast.m).cwiseAbs().maxCoeff(), 0 + 1e-300);
}

TEST(Velocity, CommutatorWithPositionIsNeighbourAverage)
{
    // [xdot, X] has a zero diagonal for any matrix stencil, so the exact
    // lattice statement is 2 nu times the two-neighbour average.
    auto g = box();
    auto ws = ground(g);
    std::mt19937_64 rng(11);
    for (double nu : {0.5, 1.0, 2.0})
    {
        auto p = params_from_nu(nu);
        auto df = drift_fields(ws, p);
        auto s = build_space(g, SpaceKind::density, ws.rho(0).cast<C>());
        auto c = commutator(velocity_operator(df, p, s, 0), position_operator(s));
        EXPECT_EQ(c.m.diagonal().cwiseAbs().maxCoeff(), 0);
        auto f = random_field(rng, g.size());
        ComplexField avg = ComplexField::Zero(f.size());
        for (Eigen::Index i = 1; i + 1 < f.size(); ++i)
            avg[i] = nu * (f[i - 1] + f[i + 1]);
        EXPECT_LT(max_interior_abs(ComplexField(c.apply(f) - avg)), 1e-12);

        // Smooth fields: the identity holds to O(dx^2).
        auto smooth = gaussian(g);
        double gap = max_interior_abs(ComplexField(c.apply(smooth) - 2 * nu * smooth));
        EXPECT_LT(gap, 2 * nu * g.dx() * g.dx());
    }
}

TEST(Velocity, ZeroDriftAndGroundState)
{
    auto g = box();
    auto ws = ground(g);
    auto p = params_from_nu(1.0);
    auto s = build_space(g, SpaceKind::lebesgue);

    auto zero = make_static_drift(g, p, [](double) { return 0.0; });
    auto v0 = velocity_operator(zero, p, s, 0);
    auto n = v0.size();
    ComplexMatrix blk = v0.m.block(1, 1, n - 2, n - 2);
    EXPECT_LT((blk + blk.transpose()).cwiseAbs().maxCoeff(), 1e-12);

    auto df = drift_fields(ws, p);
    auto v = velocity_operator(df, p, s, 0);
    ComplexField one = ComplexField::Ones(n);
    ComplexField out = v.apply(one);
    for (std::size_t i = 1; i + 1 < g.size(); ++i)
    {
        if (ws.mask[0][i])
            EXPECT_NEAR(out[static_cast<Eigen::Index>(i)].real(), -2 * g.x(i), 1e-9);
    }
    EXPECT_THROW(velocity_operator(df, minus_branch(), s, 0), UnsupportedConfiguration);
}

TEST(MappedVelocity, RealAndContinued)
{
    auto g = box();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto d = derivative_matrix(g);
    auto v = mapped_velocity_operator(params_from_nu(0.5), s);
    EXPECT_EQ((v.m - d.m).cwiseAbs().maxCoeff(), 0);

    auto pm = minus_branch();
    auto P = momentum_operator(pm, s);
    EXPECT_LT((P.m - (-I) * d.m).cwiseAbs().maxCoeff(), 1e-12);
    auto n = P.size();
    ComplexMatrix blk = P.m.block(1, 1, n - 2, n - 2);
    EXPECT_LT((blk - blk.adjoint()).cwiseAbs().maxCoeff(), 1e-12);

    // [X, P] = i hbar on smooth fields to O(dx^2).
    auto c = commutator(position_operator(s), P);
    auto f = gaussian(g);
    EXPECT_LT(max_interior_abs(ComplexField(c.apply(f) - I * f)), g.dx() * g.dx());

    auto pp = momentum_operator(plus_branch(), s);
    EXPECT_LT((pp.m - I * d.m).cwiseAbs().maxCoeff(), 1e-12);
}

//---------------------------------------------------------------------------//
// T-MAP
//---------------------------------------------------------------------------//

TEST(GaugeMap, Unitarity)
{
    auto g = box();
    auto coh = analytic_oracle(OracleKind::ho_coherent, {.x0 = 1}, g, {0.4});
    std::mt19937_64 rng(5);
    for (auto const& p : {params_from_nu(0.5), params_from_nu(2.0), minus_branch()})
    {
        auto sn = normalized_phase(coh.S[0], p);
        auto h = build_space(g, SpaceKind::density, coh.rho(0).cast<C>(), 0);
        auto it = build_space(g, SpaceKind::phase, sn);
        for (int k = 0; k < 20; ++k)
        {
            auto f = random_field(rng, g.size());
            auto q = random_field(rng, g.size());
            auto lhs = h.inner(f, q);
            auto rhs = it.inner(gauge_map_T(f, coh.R[0], sn), gauge_map_T(q, coh.R[0], sn));
            EXPECT_LT(std::abs(lhs - rhs), 1e-10);
        }
    }
}

TEST(GaugeMap, GroundStateAndIntertwining)
{
    auto g = box(0.02);
    auto ws = ground(g);
    auto p = params_from_nu(0.5);
    ComplexField one = ComplexField::Ones(static_cast<Eigen::Index>(g.size()));
    auto t1 = gauge_map_T(one, ws.R[0], normalized_phase(ws.S[0], p));
    EXPECT_LT((t1 - ws.rho(0).cwiseSqrt().cast<C>()).cwiseAbs().maxCoeff(), 1e-14);

    // T (xdot f) = 2 nu D (T f) on a state with a nonzero phase.
    auto coh = analytic_oracle(OracleKind::ho_coherent, {.x0 = 1}, g, {0.3});
    for (double nu : {0.5, 1.5})
    {
        auto pr = params_from_nu(nu);
        auto df = drift_fields(coh, pr);
        auto s = build_space(g, SpaceKind::lebesgue);
        auto sn = normalized_phase(coh.S[0], pr);
        auto f = gaussian(g, 0.5, 1.5);
        auto lhs = gauge_map_T(velocity_operator(df, pr, s, 0.3).apply(f), coh.R[0], sn);
        auto rhs = mapped_velocity_operator(pr, s).apply(gauge_map_T(f, coh.R[0], sn));
        EXPECT_LT(central_gap(g, lhs, rhs, 3), 5e-3);
    }
}

//---------------------------------------------------------------------------//
// ACCELERATION AND HAMILTONIAN
//---------------------------------------------------------------------------//

TEST(Acceleration, GroundStateBothForms)
{
    auto g = box(0.02);
    auto ws = ground(g);
    auto V = oscillator(g);
    for (double nu : {0.5, 1.0})
    {
        auto a = acceleration_function(ws, params_from_nu(nu), V);
        EXPECT_NEAR(a.coefficient, 0.5 + 2 * nu * nu, 1e-15);
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            double x = g.x(i);
            if (!a.valid[i] || std::abs(x) > 3)
                continue;
            auto k = static_cast<Eigen::Index>(i);
            EXPECT_NEAR(a.drift_form[k], 4 * nu * nu * x, 1e-9);
            EXPECT_NEAR(a.potential_form[k], 4 * nu * nu * x,
                        a.coefficient * g.dx() * g.dx() * (1 + x * x));
        }
    }
}

TEST(Acceleration, ContinuedCoefficientVanishes)
{
    EXPECT_EQ(minus_branch().rho_coefficient(), C(0));
    EXPECT_EQ(plus_branch().rho_coefficient(), C(0));
    auto g = box();
    EXPECT_THROW(acceleration_function(ground(g), minus_branch(), oscillator(g)),
                 UnsupportedConfiguration);
    // Isolated masked nodes leave nothing to differentiate.
    WaveSolution spike(g);
    ComplexField psi = ComplexField::Zero(static_cast<Eigen::Index>(g.size()));
    psi[200] = 1;
    spike.push(0, psi);
    EXPECT_THROW(acceleration_function(spike, params_from_nu(0.5), oscillator(g)), InvalidInput);
}

TEST(Hamiltonian, ContinuedOscillatorSpectrum)
{
    auto g = box();
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, oscillator(g), s);
    InteriorSpectrum spec(h, p);
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(spec.values()[k], k + 0.5, (2 * k + 1) * (2 * k + 1) * g.dx() * g.dx());
}

TEST(Hamiltonian, RealModeOnConstants)
{
    auto g = box(0.02);
    auto ws = ground(g);
    auto V = oscillator(g);
    for (double nu : {0.5, 2.0})
    {
        auto p = params_from_nu(nu);
        auto s = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto h = hamiltonian(ws, p, V, s);
        EXPECT_TRUE(h.stationary);
        ComplexField one = ComplexField::Ones(static_cast<Eigen::Index>(g.size()));
        ComplexField out = h.apply(one);
        double c = 0.5 + 2 * nu * nu;
        ComplexField expect = g.sample([&](double x) { return C(0.5 * x * x - c * (x * x - 1)); });
        EXPECT_LT(central_gap(g, out, expect, 3), c * 20 * g.dx() * g.dx());
    }
}

TEST(Hamiltonian, RecursionSeedIsMappedVelocity)
{
    auto g = box();
    auto ws = ground(g);
    auto V = oscillator(g);
    for (auto const& p : {params_from_nu(0.5), params_from_nu(1.0), params_from_nu(2.0),
                          minus_branch(), plus_branch()})
    {
        auto s = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto h = hamiltonian(ws, p, V, s);
        auto x1 = time_derivative_recursion(position_operator(s), h, p, 1).at(0);
        auto v = mapped_velocity_operator(p, s);
        EXPECT_LT(max_interior_rows_abs(x1.m - v.m), 1e-12);
    }
}

TEST(Hamiltonian, Rejections)
{
    auto g = box();
    WaveSolution hole(g);
    ComplexField psi = gaussian(g).cast<C>();
    psi[10] = 0;
    hole.push(0, psi);
    auto s = build_space(g, SpaceKind::lebesgue);
    EXPECT_THROW(hamiltonian(hole, params_from_nu(0.5), oscillator(g), s), InvalidInput);
    EXPECT_NO_THROW(hamiltonian(hole, minus_branch(), oscillator(g), s));
    EXPECT_THROW(hamiltonian(hole, minus_branch(), RealField::Zero(3), s), InvalidInput);
}

//---------------------------------------------------------------------------//
// RECURSION AND HEISENBERG OPERATORS
//---------------------------------------------------------------------------//

TEST(Recursion, FreeParticleTerminates)
{
    auto g = box();
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, RealField::Zero(static_cast<Eigen::Index>(g.size())), s);
    auto terms = time_derivative_recursion(position_operator(s), h, p, 2);
    auto P = momentum_operator(p, s);
    EXPECT_LT(max_interior_rows_abs(terms[0].m - P.m), 1e-12);
    // Rows next to the walls see the one-sided Laplacian rows.
    double inner = 0;
    for (Eigen::Index i = 2; i + 2 < terms[1].size(); ++i)
        inner = std::max(inner, terms[1].m.row(i).cwiseAbs().maxCoeff());
    EXPECT_LT(inner, 1e-9);

    auto t1 = taylor_heisenberg(position_operator(s), h, 2.5, 1, p);
    OperatorMatrix x = position_operator(s);
    EXPECT_LT(max_interior_rows_abs(t1.m - (x.m + 2.5 * P.m)), 1e-12);
    EXPECT_EQ((taylor_heisenberg(x, h, 2.5, 0, p).m - x.m).cwiseAbs().maxCoeff(), 0);
}

TEST(Recursion, OscillatorSecondDerivative)
{
    auto g = box();
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, oscillator(g), s);
    auto x = position_operator(s);
    auto terms = time_derivative_recursion(x, h, p, 2);
    auto f = gaussian(g);
    EXPECT_LT(central_gap(g, terms[1].apply(f), ComplexField(-x.apply(f)), 6), g.dx() * g.dx());
}

TEST(Recursion, RealModeMatchesAcceleration)
{
    auto g = box(0.02);
    auto ws = ground(g);
    auto V = oscillator(g);
    for (double nu : {0.5, 1.0})
    {
        auto p = params_from_nu(nu);
        auto s = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto h = hamiltonian(ws, p, V, s);
        auto terms = time_derivative_recursion(position_operator(s), h, p, 2);
        auto acc = acceleration_function(ws, p, V);
        auto f = gaussian(g);
        ComplexField expect = acc.drift_form.cast<C>().cwiseProduct(f);
        EXPECT_LT(central_gap(g, terms[1].apply(f), expect, 3), 5e-3 * nu * nu);
    }
}

TEST(Recursion, RejectsNonStationaryRealMode)
{
    auto g = box();
    auto coh = analytic_oracle(OracleKind::ho_coherent, {.x0 = 1}, g, {0.0, 0.1});
    auto p = params_from_nu(0.5);
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(coh, p, oscillator(g), s);
    EXPECT_FALSE(h.stationary);
    EXPECT_THROW(time_derivative_recursion(position_operator(s), h, p, 1),
                 UnsupportedConfiguration);
    auto hc = hamiltonian(coh, minus_branch(), oscillator(g), s);
    EXPECT_NO_THROW(time_derivative_recursion(position_operator(s), hc, minus_branch(), 1));
}

TEST(Heisenberg, OscillatorClosedForm)
{
    auto g = box();
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, oscillator(g), s);
    auto x = position_operator(s);
    auto P = momentum_operator(p, s);
    InteriorSpectrum spec(h, p);
    auto basis = low_energy_basis(spec, 8);

    auto x0 = heisenberg_operator(x, h, 0, p);
    EXPECT_LT(max_interior_rows_abs(x0.m - x.m), 1e-12);
    for (double t : {0.1, 1.0})
    {
        auto xs = heisenberg_operator(x, h, t, p);
        ComplexMatrix expect = std::cos(t) * x.m + std::sin(t) * P.m;
        EXPECT_LT(subspace_gap(xs.m, expect, basis, g.dx()), 5e-3);
    }
    auto taylor = taylor_heisenberg(x, hard_wall(h), 0.1, 10, p);
    auto exact = heisenberg_operator(x, h, 0.1, p);
    EXPECT_LT(subspace_gap(taylor.m, exact.m, basis, g.dx()), 1e-8);
}

TEST(Heisenberg, HardWallDropsBoundaryRows)
{
    auto g = box();
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ground(g), p, oscillator(g), s);
    auto w = hard_wall(h);
    auto n = w.size();
    EXPECT_EQ(w.m.row(0).cwiseAbs().maxCoeff(), 0);
    EXPECT_EQ(w.m.col(n - 1).cwiseAbs().maxCoeff(), 0);
    EXPECT_EQ((w.m.block(1, 1, n - 2, n - 2) - h.m.block(1, 1, n - 2, n - 2)).cwiseAbs().maxCoeff(), 0);
}

TEST(Heisenberg, FreePacketMovesWithMomentum)
{
    auto g = box(0.04, 12);
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, RealField::Zero(static_cast<Eigen::Index>(g.size())), s);
    auto x = position_operator(s);
    auto P = momentum_operator(p, s);
    auto f = gaussian(g);
    auto xs = heisenberg_operator(x, h, 0.5, p);
    ComplexField expect = x.apply(f) + 0.5 * P.apply(f);
    EXPECT_LT(central_gap(g, xs.apply(f), expect, 8), 5e-3);
    EXPECT_THROW(heisenberg_operator(x, h, 0.5, params_from_nu(0.5)), UnsupportedConfiguration);
}

//---------------------------------------------------------------------------//
// CORRELATIONS
//---------------------------------------------------------------------------//

TEST(Correlation, EqualTimeIsNuIndependent)
{
    auto g = box();
    auto ws = ground(g);
    for (auto const& p : {params_from_nu(0.5), params_from_nu(1.0), params_from_nu(2.0),
                          minus_branch(), plus_branch()})
    {
        auto s = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto x = position_operator(s);
        auto v = correlation(correlation_state(ws, 0, p), {x, x}, s);
        EXPECT_NEAR(v.real(), 0.5, 1e-6);
        EXPECT_NEAR(v.imag(), 0, 1e-15);
    }
}

TEST(Correlation, OrderingAndRejection)
{
    auto g = box(0.1, 2);
    auto s = build_space(g, SpaceKind::lebesgue);
    auto x = position_operator(s);
    auto d = derivative_matrix(g);
    auto f = gaussian(g);
    auto v = correlation(f, {d, x}, s);
    EXPECT_NEAR(std::abs(v - s.inner(f, ComplexField(x.m * (d.m * f)))), 0, 1e-12);
    OperatorMatrix small{ComplexMatrix::Identity(3, 3), "I3"};
    EXPECT_THROW(correlation(f, {small}, s), InvalidInput);
}

TEST(Correlation, ContinuedGroundStateTwoTime)
{
    auto g = box();
    auto ws = ground(g);
    auto p = minus_branch();
    auto s = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ws, p, oscillator(g), s);
    auto x = position_operator(s);
    auto psi = correlation_state(ws, 0, p);
    for (double t : {0.25, 0.5, 1.0})
    {
        auto v = correlation(psi, {x, heisenberg_operator(x, h, t, p)}, s);
        EXPECT_LT(std::abs(v - 0.5 * std::exp(-I * t)), 2e-3);
    }
}

TEST(Correlation, RealModeSemigroupIsOrnsteinUhlenbeck)
{
    auto g = box();
    auto ws = ground(g);
    auto V = oscillator(g);
    for (double nu : {0.5, 1.0})
    {
        auto p = params_from_nu(nu);
        auto s = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto h = hamiltonian(ws, p, V, s);
        auto x = position_operator(s);
        auto t1 = correlation_state(ws, 0, p);
        for (double lag : {0.0, 0.25, 1.0})
        {
            auto v = semigroup_correlation(t1, x, h, lag, p, s);
            EXPECT_NEAR(v.real(), 0.5 * std::exp(-2 * nu * lag), 2e-3);
        }
    }
    EXPECT_THROW(semigroup_correlation(correlation_state(ws, 0, params_from_nu(0.5)),
                                       position_operator(build_space(g, SpaceKind::lebesgue)),
                                       hamiltonian(ws, params_from_nu(0.5), V,
                                                   build_space(g, SpaceKind::lebesgue)),
                                       -1, params_from_nu(0.5), build_space(g, SpaceKind::lebesgue)),
                 InvalidInput);
}

//---------------------------------------------------------------------------//
// CONTINUATION AND REPORTS
//---------------------------------------------------------------------------//

TEST(Continuation, Parameters)
{
    auto p = minus_branch();
    EXPECT_EQ(p.nu, C(0, -0.5));
    EXPECT_EQ(p.z, C(0, -1));
    EXPECT_EQ(plus_branch().nu, C(0, 0.5));
    auto g = box();
    auto coh = analytic_oracle(OracleKind::ho_coherent, {.x0 = 1}, g, {0.6});
    for (auto const& q : {params_from_nu(0.7), p, plus_branch()})
    {
        auto sn = normalized_phase(coh.S[0], q);
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            if (coh.mask[0][i])
            {
                auto k = static_cast<Eigen::Index>(i);
                EXPECT_NEAR(std::abs(q.z * sn[k] - coh.S[0][k]), 0, 1e-14);
            }
        }
    }
}

TEST(AlgebraReport, JsonAndMatrixCsv)
{
    auto g = box(0.5, 1);
    auto r = make_residual_report("recursion_seed", g, minus_branch(), 1e-14, 1e-12);
    auto j = to_json(r);
    EXPECT_TRUE(j.at("pass").get<bool>());
    EXPECT_EQ(j.at("grid_n").get<std::size_t>(), g.size());
    EXPECT_DOUBLE_EQ(j.at("nu").at("im").get<double>(), -0.5);
    for (char const* key : {"identity_name", "dx", "max_interior_residual", "tolerance"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_FALSE(to_json(make_residual_report("x", g, params_from_nu(1), 1, 1)).at("pass").get<bool>());

    auto dir = fs::temp_directory_path() / "smlab_algebra_io";
    fs::remove_all(dir);
    auto P = momentum_operator(minus_branch(), build_space(g, SpaceKind::lebesgue));
    write_matrix_csv(dir / "P.csv", P);
    std::ifstream in(dir / "P.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "row,col,re,im");
    std::size_t rows = 0;
    while (std::getline(in, line))
        ++rows;
    EXPECT_EQ(rows, g.size() * g.size());
    fs::remove_all(dir);
}
