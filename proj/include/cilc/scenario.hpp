#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cilc/collective.hpp"
#include "cilc/noilc.hpp"
#include "cilc/twipr.hpp"

namespace cilc {

/// One agent entry of a scenario: either explicit (Q, L) matrices or
/// norm-optimal weights to synthesize them from the scenario plant.
struct AgentSpec {
    int id = 1;
    std::optional<Matrix> Q;
    std::optional<Matrix> L;
    std::optional<NoilcWeights> noilc;
    double inertia_scale = 1.0; // per-agent truth perturbation (twipr runs)
};

enum class PlantSource { AppendixA, Twipr, Explicit };
enum class ReferenceSource { Explicit, TwiprManeuver };

/// Parsed scenario file (JSON, schema_version 1). The seed fully
/// determines every randomized computation of a run.
struct ScenarioConfig {
    std::string scenario;
    PlantSource plant_source = PlantSource::AppendixA;
    std::optional<Matrix> P;
    std::optional<Vector> d;
    TwiprConfig twipr;
    int horizon = 100;
    std::vector<AgentSpec> agents;
    ReferenceSource reference_source = ReferenceSource::Explicit;
    std::optional<Vector> reference;
    int trials = 30;
    std::uint64_t seed = 1;
    bool hold_on_no_improvement = false;
    bool distributed_election = false;
    std::optional<std::filesystem::path> topology_file;
    std::filesystem::path out_dir = "out";
};

ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Resolves the config into a runnable collective (synthesizing NO-ILC
/// laws where requested). Throws ConfigError with a field-level message.
Collective resolve_collective(const ScenarioConfig& cfg);

/// The Appendix-A plant and the two reference agents.
LiftedPlant appendix_a_plant();
std::vector<AgentLaw> appendix_a_laws();

/// Named NO-ILC profiles of the simulation study (non-paper defaults,
/// recorded in the emitted config of every twipr run).
NoilcWeights greedy_weights();
NoilcWeights conservative_weights();
NoilcWeights balanced_weights();

} // namespace cilc
