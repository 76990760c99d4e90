#pragma once

#include <string>
#include <vector>

#include "smlab/harness/pipeline.hpp"

namespace smlab
{
//! Every named check, in suite order.
inline std::vector<CheckSpec> const& builtin_checks()
{
    using namespace checks;
    static std::vector<CheckSpec> const specs{
        {"commutator_velocity_position", "[xdot, X] = 2 nu", SuiteLevel::fast, 1,
         commutator_velocity_position},
        {"canonical_commutator", "[X, P] = i hbar after continuation", SuiteLevel::fast, 2,
         canonical_commutator},
        {"gauge_map_unitarity", "T-map isometry H_t -> I_t", SuiteLevel::fast, 3,
         gauge_map_unitarity},
        {"recursion_seed", "Hamiltonian recursion seed [H, X]/2m nu = 2 nu D", SuiteLevel::fast, 4,
         recursion_seed},
        {"acceleration_identity", "acceleration from drift equals potential plus density term",
         SuiteLevel::fast, 5, acceleration_identity},
        {"heisenberg_operators", "Heisenberg operators by recursion and by conjugation",
         SuiteLevel::fast, 6, heisenberg_operators},
        {"schrodinger_ground_stationary", "Schrodinger evolution keeps the ground-state density",
         SuiteLevel::fast, 0, schrodinger_ground_stationary},
        {"drift_construction", "drifts b = v + u, b* = v - u from the Madelung data",
         SuiteLevel::fast, 0, drift_construction},
        {"fokker_planck_stationary", "Fokker-Planck with the ground drift keeps rho stationary",
         SuiteLevel::fast, 0, fokker_planck_stationary},
        {"sampler_determinism", "paths depend only on seed and global path index",
         SuiteLevel::fast, 0, sampler_determinism},
        {"quadratic_variation", "quadratic variation of paths equals 2 nu", SuiteLevel::full, 7,
         quadratic_variation},
        {"drift_osmotic", "forward/backward drifts and osmotic velocity nu d ln rho",
         SuiteLevel::full, 8, drift_osmotic},
        {"mean_acceleration", "symmetric mean acceleration equals -V'/m (Newton's law on average)",
         SuiteLevel::full, 9, mean_acceleration},
        {"nu_independence", "equal-time statistics do not depend on nu", SuiteLevel::full, 10,
         nu_independence},
        {"feynman_kac", "two-time path correlation equals the operator matrix element",
         SuiteLevel::full, 11, feynman_kac},
        {"fokker_planck_schrodinger", "Fokker-Planck under the drift fields transports rho = e^{2R}",
         SuiteLevel::full, 12, fokker_planck_schrodinger},
        {"stationary_variance", "sampled variance matches the density of the solved state",
         SuiteLevel::config, 0, stationary_variance_check},
    };
    return specs;
}

inline CheckSpec const* find_check(std::string const& name)
{
    for (auto const& s : builtin_checks())
    {
        if (s.name == name)
            return &s;
    }
    return nullptr;
}

inline std::vector<std::string> check_names()
{
    std::vector<std::string> out;
    for (auto const& s : builtin_checks())
        out.push_back(s.name);
    return out;
}

}  // namespace smlab
