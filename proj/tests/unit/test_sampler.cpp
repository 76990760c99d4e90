#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "smlab/fields.hpp"
#include "smlab/sampler.hpp"

using namespace smlab;

namespace
{
constexpr double pi = std::numbers::pi;

Grid1D box(double half = 10, double dx = 0.02)
{
    return Grid1D::with_spacing(-half, half, dx);
}

RealField gaussian(Grid1D const& g, double var)
{
    return g.sample([&](double x) {
        return std::exp(-x * x / (2 * var)) / std::sqrt(2 * pi * var);
    });
}

DriftField constant_drift(Grid1D const& g, double nu, double b = 0)
{
    return make_static_drift(g, params_from_nu(nu), [=](double) { return b; }, "const");
}

DriftField ou_drift(Grid1D const& g, double nu)
{
    // Ground-state drift b = -2 nu x, b* = +2 nu x.
    return make_drift_field(
        g, params_from_nu(nu), {0.0}, [=](double x, double) { return -2 * nu * x; },
        [=](double x, double) { return 2 * nu * x; }, "ou");
}
}  // namespace

//---------------------------------------------------------------------------//
// PHILOX
//---------------------------------------------------------------------------//

TEST(Philox, KnownAnswers)
{
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
              (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                   {0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                   {0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformsOpenIntervalAndNormalMoments)
{
    EXPECT_GT(to_open_unit(0, 0), 0.0);
    EXPECT_LT(to_open_unit(0xffffffff, 0xffffffff), 1.0);
    PathRandom rng(42, 7, StreamPurpose::increments);
    double s = 0, s2 = 0;
    int n = 200000;
    for (int i = 0; i < n / 2; ++i)
    {
        auto [a, b] = rng.normals(static_cast<std::uint64_t>(i));
        s += a + b;
        s2 += a * a + b * b;
    }
    EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(n));
    EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Philox, StreamsDifferByPathAndPurpose)
{
    PathRandom a(1, 0, StreamPurpose::increments);
    PathRandom b(1, 1, StreamPurpose::increments);
    PathRandom c(1, 0, StreamPurpose::initial);
    PathRandom d(2, 0, StreamPurpose::increments);
    EXPECT_NE(a.block(0), b.block(0));
    EXPECT_NE(a.block(0), c.block(0));
    EXPECT_NE(a.block(0), d.block(0));
    EXPECT_EQ(a.block(5), PathRandom(1, 0, StreamPurpose::increments).block(5));
}

//---------------------------------------------------------------------------//
// INITIAL SAMPLING
//---------------------------------------------------------------------------//

TEST(SampleInitial, GaussianMoments)
{
    auto g = box();
    auto x = sample_initial(g, gaussian(g, 0.5), 100000, 42);
    auto m = sample_moments(x);
    EXPECT_LT(std::abs(m.mean), 3 * m.mean_se);
    EXPECT_LT(std::abs(m.variance - 0.5), 3 * m.variance_se);
}

TEST(SampleInitial, EmptyDeltaAndRejects)
{
    auto g = box(1, 0.1);
    EXPECT_EQ(sample_initial(box(), gaussian(box(), 0.5), 0, 1).size(), 0);
    RealField spike = RealField::Zero(static_cast<Eigen::Index>(g.size()));
    spike[7] = 1 / g.dx();
    auto x = sample_initial(g, spike, 5000, 3);
    EXPECT_GT(x.minCoeff(), g.x(6));
    EXPECT_LT(x.maxCoeff(), g.x(8));
    RealField zero = RealField::Zero(static_cast<Eigen::Index>(g.size()));
    EXPECT_THROW(sample_initial(g, zero, 10, 1), InvalidInput);
    EXPECT_THROW(sample_initial(g, RealField(2 * spike), 10, 1), InvalidInput);
}

TEST(SampleInitial, ChunksMatchWhole)
{
    auto g = box();
    RealField rho = gaussian(g, 1.0);
    auto whole = sample_initial(g, rho, 1000, 9);
    auto tail = sample_initial(g, rho, 400, 9, 600);
    EXPECT_EQ(whole.tail(400), tail);
}

TEST(PiecewiseLinear, InverseOfCdf)
{
    Grid1D g(0, 1, 3);
    RealField rho(3);
    rho << 0, 2, 0;
    PiecewiseLinearDensity law(g, rho);
    EXPECT_DOUBLE_EQ(law.total(), 1.0);
    for (double u : {0.01, 0.125, 0.3, 0.5, 0.77, 0.99})
        EXPECT_NEAR(law.mass_below(law.inverse_cdf(u)), u, 1e-14);
    EXPECT_NEAR(law.inverse_cdf(0.125), 0.25, 1e-14);
}

//---------------------------------------------------------------------------//
// SIMULATION
//---------------------------------------------------------------------------//

TEST(Simulate, WienerVariance)
{
    auto g = box();
    RealField x0 = RealField::Zero(100000);
    auto e = simulate_ensemble(constant_drift(g, 0.5), x0, params_from_nu(0.5), 5e-3, 200, 42,
                               {.record = RecordPlan({0, 100, 200})});
    for (std::size_t j : {100u, 200u})
    {
        auto m = sample_moments(e.at(j));
        double t = e.time(j);
        EXPECT_LT(std::abs(m.variance - t), 3 * m.variance_se) << "t = " << t;
    }
}

TEST(Simulate, OrnsteinUhlenbeckRelaxesToHalf)
{
    auto g = box();
    RealField x0 = RealField::Constant(100000, 1.0);
    auto e = simulate_ensemble(ou_drift(g, 0.5), x0, params_from_nu(0.5), 5e-3, 2000, 42,
                               {.record = RecordPlan({0, 2000})});
    auto m = sample_moments(e.at(2000));
    EXPECT_NEAR(m.variance, 0.5, 0.005);
    EXPECT_LT(std::abs(m.mean), 3 * m.mean_se + 1e-3);
}

TEST(Simulate, DeterministicAcrossWorkersAndChunks)
{
    auto g = box();
    auto df = ou_drift(g, 1.0);
    auto x0 = sample_initial(g, gaussian(g, 0.5), 3000, 11);
    auto p = params_from_nu(1.0);
    auto one = simulate_ensemble(df, x0, p, 1e-3, 101, 11, {.workers = 1});
    auto eight = simulate_ensemble(df, x0, p, 1e-3, 101, 11, {.workers = 8});
    EXPECT_EQ(one.positions, eight.positions);

    SimulationOptions chunk;
    chunk.path_offset = 1000;
    auto part = simulate_ensemble(df, RealField(x0.segment(1000, 500)), p, 1e-3, 101, 11, chunk);
    EXPECT_EQ(part.positions, one.positions.middleRows(1000, 500));

    auto other = simulate_ensemble(df, x0, p, 1e-3, 101, 12);
    EXPECT_NE(other.positions, one.positions);
}

TEST(Simulate, ReflectionKeepsPathsInside)
{
    Grid1D g(-1, 1, 101);
    RealField x0 = RealField::Constant(2000, 0.9);
    auto e = simulate_ensemble(constant_drift(g, 2.0, 3.0), x0, params_from_nu(2.0), 1e-3, 500,
                               5);
    EXPECT_LE(e.positions.maxCoeff(), 1.0);
    EXPECT_GE(e.positions.minCoeff(), -1.0);
}

TEST(Simulate, Rejections)
{
    auto g = box(1, 0.01);
    RealField x0 = RealField::Zero(10);
    auto p = params_from_nu(0.5);
    EXPECT_THROW(simulate_ensemble(constant_drift(g, 0.5, 100.0), x0, p, 0.01, 10, 1),
                 InvalidInput);
    EXPECT_THROW(simulate_ensemble(constant_drift(g, 0.5), RealField::Constant(3, 5.0), p, 0.01,
                                   10, 1),
                 InvalidInput);
    auto cont = diffusion_params(ParamKind::nu, 0, 1, 1, Mode::continued_minus);
    EXPECT_THROW(simulate_ensemble(constant_drift(g, 0.5), x0, cont, 0.01, 10, 1),
                 UnsupportedConfiguration);
    EXPECT_THROW(simulate_ensemble(constant_drift(g, 0.5), x0, p, 0.01, 10, 1,
                                   {.record = RecordPlan({11})}),
                 InvalidInput);
}

//---------------------------------------------------------------------------//
// ESTIMATORS
//---------------------------------------------------------------------------//

namespace
{
//! Stationary OU ensemble at nu = 0.5 recorded on a window of steps.
Ensemble const& stationary_ou()
{
    static Ensemble e = [] {
        auto g = box();
        auto x0 = sample_initial(g, gaussian(g, 0.5), 100000, 42);
        return simulate_ensemble(ou_drift(g, 0.5), x0, params_from_nu(0.5), 1e-3, 40, 42);
    }();
    return e;
}

template<class Check>
int check_bins(ConditionalMomentTable const& t, std::size_t min_count, Check&& check)
{
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (t.count(i) < min_count)
            continue;
        check(i);
        ++n;
    }
    return n;
}
}  // namespace

TEST(Estimators, ForwardAndBackwardDrift)
{
    auto const& e = stationary_ou();
    Binning bins(-2, 2, 20);
    auto fwd = estimate_forward_drift(e, {20}, bins);
    auto bwd = estimate_backward_drift(e, {20}, bins);
    int used = check_bins(fwd, acceptance_occupancy, [&](std::size_t i) {
        double x = fwd.mean_position(i);
        EXPECT_LT(std::abs(fwd.estimate(i) + x), 3 * fwd.std_error(i)) << "bin " << i;
        double xb = bwd.mean_position(i);
        EXPECT_LT(std::abs(bwd.estimate(i) - xb), 3 * bwd.std_error(i)) << "bin " << i;
    });
    EXPECT_GT(used, 10);
}

TEST(Estimators, OsmoticIdentityAgainstHistogram)
{
    auto const& e = stationary_ou();
    double h = 0.2;
    Binning bins(-2, 2, 20);
    auto fwd = estimate_forward_drift(e, {20}, bins);
    auto bwd = estimate_backward_drift(e, {20}, bins);
    auto hist = density_histogram(e, 20, bins);
    double nu = 0.5;
    for (std::size_t i = 1; i + 1 < bins.size(); ++i)
    {
        if (hist.count[i - 1] < acceptance_occupancy || hist.count[i + 1] < acceptance_occupancy)
            continue;
        double osm = 0.5 * (fwd.estimate(i) - bwd.estimate(i));
        double osm_se = 0.5 * std::hypot(fwd.std_error(i), bwd.std_error(i));
        auto cm = static_cast<double>(hist.count[i - 1]);
        auto cp = static_cast<double>(hist.count[i + 1]);
        double grad = nu * (std::log(cp) - std::log(cm)) / (2 * h);
        double grad_se = nu * std::sqrt(1 / cp + 1 / cm) / (2 * h);
        // Central difference of ln rho = -x^2 is exact, so no bias term.
        EXPECT_LT(std::abs(osm - grad), 3 * std::hypot(osm_se, grad_se)) << "bin " << i;
    }
}

TEST(Estimators, QuadraticVariationPooled)
{
    auto const& e = stationary_ou();
    std::vector<std::size_t> steps;
    for (std::size_t j = 0; j < 40; ++j)
        steps.push_back(j);
    Binning bins(-1.5, 1.5, 12);
    auto qv = estimate_quadratic_variation(e, steps, bins);
    int used = check_bins(qv, acceptance_occupancy, [&](std::size_t i) {
        EXPECT_NEAR(qv.estimate(i), 1.0, 0.02) << "bin " << i;
    });
    EXPECT_EQ(used, 12);
    EXPECT_NEAR(qv.overall().first, 1.0, 0.01);
}

TEST(Estimators, SingleObservationTablesAreUnusable)
{
    auto g = box();
    RealField x0 = RealField::Zero(1);
    auto e = simulate_ensemble(ou_drift(g, 0.5), x0, params_from_nu(0.5), 1e-3, 5, 1);
    auto t = estimate_forward_drift(e, {2}, Binning(-1, 1, 10));
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        EXPECT_FALSE(t.usable(i));
        EXPECT_TRUE(std::isnan(t.estimate(i)));
    }
}

TEST(Estimators, EndpointIndicesRejected)
{
    auto const& e = stationary_ou();
    Binning bins(-1, 1, 4);
    EXPECT_THROW(estimate_forward_drift(e, {40}, bins), InvalidInput);
    EXPECT_THROW(estimate_backward_drift(e, {0}, bins), InvalidInput);
    EXPECT_THROW(estimate_quadratic_variation(e, {40}, bins), InvalidInput);
    EXPECT_THROW(estimate_second_difference(e, {0}, bins), InvalidInput);
    EXPECT_THROW(estimate_second_difference(e, {40}, bins), InvalidInput);
}

TEST(Estimators, DriftlessUniformStart)
{
    Grid1D g(-1, 1, 201);
    RealField flat = RealField::Constant(201, 0.5);
    auto x0 = sample_initial(g, flat, 50000, 8);
    auto df = constant_drift(g, 0.5);
    auto e = simulate_ensemble(df, x0, params_from_nu(0.5), 1e-4, 10, 8);
    Binning bins(-0.5, 0.5, 5);
    auto fwd = estimate_forward_drift(e, {5}, bins);
    auto bwd = estimate_backward_drift(e, {5}, bins);
    auto acc = estimate_second_difference(e, {5}, bins);
    for (std::size_t i = 0; i < bins.size(); ++i)
    {
        EXPECT_LT(std::abs(fwd.estimate(i)), 3 * fwd.std_error(i));
        EXPECT_LT(std::abs(bwd.estimate(i)), 3 * bwd.std_error(i));
        EXPECT_LT(std::abs(acc.estimate(i)), 3 * acc.std_error(i));
    }
    auto two_stage = estimate_mean_acceleration(e, df, {5}, bins);
    for (std::size_t i = 0; i < bins.size(); ++i)
        EXPECT_EQ(two_stage.estimate(i), 0.0);
}

TEST(Estimators, MeanAccelerationGroundState)
{
    // Stationary OU at nu = 1/2: the mean acceleration is -x.
    auto const& e = stationary_ou();
    auto g = box();
    auto df = ou_drift(g, 0.5);
    std::vector<std::size_t> steps;
    for (std::size_t j = 1; j < 40; ++j)
        steps.push_back(j);
    Binning bins(-2, 2, 8);
    auto acc = estimate_mean_acceleration(e, df, steps, bins);
    int used = check_bins(acc, acceptance_occupancy, [&](std::size_t i) {
        double x = acc.mean_position(i);
        EXPECT_LT(std::abs(acc.estimate(i) + x), 3 * acc.std_error(i)) << "bin " << i;
    });
    EXPECT_GT(used, 4);
}

TEST(Estimators, TableMergeEqualsWhole)
{
    auto const& e = stationary_ou();
    Binning bins(-2, 2, 10);
    auto whole = estimate_forward_drift(e, {3, 4}, bins);
    auto a = estimate_forward_drift(e, {3}, bins);
    a.merge(estimate_forward_drift(e, {4}, bins));
    for (std::size_t i = 0; i < bins.size(); ++i)
    {
        EXPECT_EQ(a.count(i), whole.count(i));
        EXPECT_NEAR(a.estimate(i), whole.estimate(i), 1e-12);
    }
    EXPECT_THROW(a.merge(ConditionalMomentTable(Binning(-1, 1, 10))), InvalidInput);
}

TEST(Estimators, HistogramOfWienerProcess)
{
    auto g = box(8, 0.05);
    RealField x0 = RealField::Zero(1000000);
    auto e = simulate_ensemble(constant_drift(g, 0.5), x0, params_from_nu(0.5), 0.01, 100, 3,
                               {.record = RecordPlan({100})});
    auto hist = density_histogram(e, 100, Binning(-5, 5, 100));
    PiecewiseLinearDensity ref(g, gaussian(g, 1.0));
    EXPECT_LT(hist.l1_distance(ref), 0.01);
}

TEST(Estimators, FreePacketSpreadsLikeTheOracle)
{
    auto g = box(15, 0.05);
    OracleParams op;
    op.sigma0 = 1.0;
    double dt = 1e-3;
    auto ws = analytic_oracle(OracleKind::free_gaussian, op, g, uniform_times(0.02, 100));
    auto df = drift_fields(ws, params_from_nu(0.5));
    auto x0 = sample_initial(g, ws.rho(0), 100000, 77);
    auto e = simulate_ensemble(df, x0, params_from_nu(0.5), dt, 2000, 77,
                               {.record = RecordPlan({2000})});
    auto m = sample_moments(e.at(2000));
    EXPECT_LT(std::abs(m.variance - free_gaussian_variance(op, 2.0)), 3 * m.variance_se);
}

TEST(Estimators, TwoTimeCorrelationOfStationaryOu)
{
    auto const& e = stationary_ou();
    auto c = estimate_two_time(e, {0, 10}, 30);
    EXPECT_NEAR(c.lag_time, 0.03, 1e-15);
    EXPECT_LT(std::abs(c.estimate - 0.5 * std::exp(-0.03)), 3 * c.std_error);
}

//---------------------------------------------------------------------------//
// EXPORT
//---------------------------------------------------------------------------//

TEST(SamplerIo, CsvAndBinaryRoundTrip)
{
    auto dir = std::filesystem::temp_directory_path() / "smlab_sampler_io";
    std::filesystem::remove_all(dir);
    auto g = box();
    RealField x0 = RealField::LinSpaced(4, -1, 1);
    auto e = simulate_ensemble(ou_drift(g, 0.5), x0, params_from_nu(0.5), 1e-2, 6, 5,
                               {.record = RecordPlan({0, 3, 4, 6}), .path_offset = 10});
    write_ensemble_csv(dir / "paths.csv", e);
    write_ensemble_binary(dir, "paths", e);
    auto back = read_ensemble_binary(dir, "paths");
    EXPECT_EQ(back.positions, e.positions);
    EXPECT_EQ(back.steps, e.steps);
    EXPECT_EQ(back.seed, 5u);
    EXPECT_EQ(back.path_offset, 10u);
    EXPECT_EQ(back.params.nu, e.params.nu);
    EXPECT_EQ(std::filesystem::file_size(dir / "paths.bin"), 4u * 4u * 8u);

    std::ifstream in(dir / "paths.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "path_id,step,x");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 5), "10,0,");

    auto t = estimate_forward_drift(e, {3}, Binning(-2, 2, 2), 1);
    write_table_csv(dir / "table.csv", t);
    std::ifstream tin(dir / "table.csv");
    std::getline(tin, line);
    EXPECT_EQ(line, "bin_center,count,estimate,std_error");
    std::filesystem::remove_all(dir);
}
