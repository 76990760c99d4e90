#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "smlab/grid.hpp"
#include "smlab/params.hpp"

using namespace smlab;

TEST(Grid1D, SpacingAndNodes)
{
    Grid1D g(-1.0, 1.0, 5);
    EXPECT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.dx(), 0.5);
    EXPECT_DOUBLE_EQ(g.x(0), -1.0);
    EXPECT_DOUBLE_EQ(g.x(4), 1.0);
    auto nodes = g.nodes();
    EXPECT_DOUBLE_EQ(nodes[2], 0.0);
}

TEST(Grid1D, RejectsBadInput)
{
    EXPECT_THROW(Grid1D(0.0, 1.0, 2), InvalidInput);
    EXPECT_THROW(Grid1D(1.0, 1.0, 10), InvalidInput);
    EXPECT_THROW(Grid1D(2.0, 1.0, 10), InvalidInput);
    EXPECT_THROW(Grid1D::with_spacing(0, 1, 0), InvalidInput);
}

TEST(Grid1D, WithSpacing)
{
    auto g = Grid1D::with_spacing(-8, 8, 0.02);
    EXPECT_EQ(g.size(), 801u);
    EXPECT_NEAR(g.dx(), 0.02, 1e-15);
}

TEST(Grid1D, TrapezoidIntegratesGaussian)
{
    auto g = Grid1D::with_spacing(-10, 10, 0.05);
    RealField f = g.sample([](double x) {
        return std::exp(-x * x) / std::sqrt(std::numbers::pi);
    });
    EXPECT_NEAR(trapezoid(g, f), 1.0, 1e-13);
}

TEST(DiffusionParams, BetaZeroGivesHbarOverTwoM)
{
    auto p = diffusion_params(ParamKind::beta, 0.0);
    EXPECT_DOUBLE_EQ(p.z.real(), 1.0);
    EXPECT_DOUBLE_EQ(p.nu.real(), 0.5);
}

TEST(DiffusionParams, BetaThreeHalves)
{
    auto p = diffusion_params(ParamKind::beta, 1.5);
    EXPECT_NEAR(p.z.real(), 2.0, 1e-15);
    EXPECT_NEAR(p.nu.real(), 1.0, 1e-15);
}

TEST(DiffusionParams, DomainErrors)
{
    EXPECT_THROW(diffusion_params(ParamKind::beta, 2.0), DomainError);
    EXPECT_THROW(diffusion_params(ParamKind::beta, 3.0), DomainError);
    EXPECT_THROW(diffusion_params(ParamKind::nu, 0.0), DomainError);
    EXPECT_THROW(diffusion_params(ParamKind::nu, -1.0), DomainError);
    EXPECT_THROW(diffusion_params(ParamKind::z, -1.0), DomainError);
}

TEST(DiffusionParams, FamilyRelationsHold)
{
    for (double nu : {0.1, 0.5, 1.0, 2.0, 7.5})
    {
        for (double m : {1.0, 2.0})
        {
            auto p = diffusion_params(ParamKind::nu, nu, m, 1.3);
            double z = p.z.real();
            EXPECT_NEAR(z, 1 / std::sqrt(1 - p.beta / 2), 1e-14 * z);
            EXPECT_NEAR(std::abs(p.current_scale() - Complex(1.3 / m)), 0, 1e-15);
            auto q = diffusion_params(ParamKind::beta, p.beta, m, 1.3);
            EXPECT_NEAR(q.nu.real(), nu, 1e-13 * nu);
        }
    }
}

TEST(DiffusionParams, ContinuedBranches)
{
    auto minus = diffusion_params(ParamKind::nu, 0, 1, 1, Mode::continued_minus);
    EXPECT_EQ(minus.nu, Complex(0, -0.5));
    EXPECT_EQ(minus.z, Complex(0, -1));
    EXPECT_EQ(minus.branch(), -1);
    EXPECT_EQ(minus.rho_coefficient(), Complex(0, 0));
    EXPECT_THROW(minus.nu_real(), UnsupportedConfiguration);

    auto plus = diffusion_params(ParamKind::nu, 0, 2, 3, Mode::continued_plus);
    EXPECT_EQ(plus.nu, Complex(0, 0.75));
    EXPECT_EQ(plus.rho_coefficient(), Complex(0, 0));
    EXPECT_EQ(plus.current_scale(), Complex(1.5, 0));
}

TEST(DiffusionParams, ModeStrings)
{
    EXPECT_EQ(mode_from_string("minus"), Mode::continued_minus);
    EXPECT_EQ(mode_from_string("continued-plus"), Mode::continued_plus);
    EXPECT_EQ(mode_from_string(to_string(Mode::real)), Mode::real);
    EXPECT_THROW(mode_from_string("sideways"), InvalidInput);
}
