#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "cilc/collective.hpp"

namespace cilc {

/// Directed communication graph over agents 1..M. Self-loops are
/// implicit. Construction validates strong connectivity.
struct Topology {
    int agent_count = 0;
    std::vector<std::pair<int, int>> edges; // (sender, receiver), 1-based
};

/// Throws NotStronglyConnected (with a witness pair) when some ordered
/// pair of agents has no directed path.
Topology build_topology(int agent_count,
                        std::vector<std::pair<int, int>> edges);

/// Max over ordered pairs of the shortest directed path length.
int diameter(const Topology& t);

/// What one agent floods during the election: its best candidate so far.
struct ConsensusTuple {
    double norm = 0.0;
    int id = 0;
    Vector u; // payload travels with the tuple (single-phase protocol)
    Vector e;
};

/// Per-agent election state; advance with consensus_round. Each agent's
/// held tuple is lexicographically non-increasing (norm, then id) across
/// rounds.
struct ElectionState {
    std::vector<ConsensusTuple> best; // index = agent - 1
    int round = 0;
};

ElectionState init_election(const std::vector<ConsensusTuple>& local);

/// One synchronous round: every agent broadcasts its current best to its
/// out-neighbors; receivers fold by (min norm, min id).
void consensus_round(const Topology& t, ElectionState& state);

struct ElectionResult {
    std::vector<int> elected;           // per-agent elected id
    std::vector<ConsensusTuple> winner; // per-agent copy of the winner tuple
    int rounds_used = 0;
};

/// Runs exactly diameter(t) rounds, after which every agent holds the
/// global minimum tuple.
ElectionResult elect_best_performer(const Topology& t,
                                    const std::vector<ConsensusTuple>& local);

/// CILC with the election done by max-consensus over t instead of a
/// central argmin. Bit-identical to run_cilc on the same inputs.
CilcHistory run_cilc_distributed(const Topology& t,
                                 const Collective& collective,
                                 const Vector& u0, int trials,
                                 bool hold_on_no_improvement = false);

/// Edge-list file: one "from to" pair per line (1-based ids), '#' starts
/// a comment. Agent count is the largest id seen unless a "agents M"
/// header line is present.
Topology load_topology(const std::filesystem::path& file);

} // namespace cilc
