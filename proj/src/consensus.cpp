#include "cilc/consensus.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace cilc {

namespace {

// Shortest directed path lengths from `start` (BFS; self distance 0).
std::vector<int> bfs_distances(int M,
                               const std::vector<std::vector<int>>& out,
                               int start) {
    std::vector<int> dist(static_cast<size_t>(M), -1);
    std::queue<int> queue;
    dist[static_cast<size_t>(start)] = 0;
    queue.push(start);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop();
        for (int w : out[static_cast<size_t>(v)]) {
            if (dist[static_cast<size_t>(w)] < 0) {
                dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
                queue.push(w);
            }
        }
    }
    return dist;
}

std::vector<std::vector<int>> adjacency(const Topology& t) {
    std::vector<std::vector<int>> out(static_cast<size_t>(t.agent_count));
    for (const auto& [from, to] : t.edges)
        out[static_cast<size_t>(from - 1)].push_back(to - 1);
    return out;
}

bool tuple_less(const ConsensusTuple& a, const ConsensusTuple& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.id < b.id;
}

} // namespace

Topology build_topology(int agent_count,
                        std::vector<std::pair<int, int>> edges) {
    if (agent_count < 1)
        throw DimensionMismatch("topology needs at least one agent");
    for (const auto& [from, to] : edges) {
        if (from < 1 || from > agent_count || to < 1 || to > agent_count)
            throw DimensionMismatch("edge endpoint out of range");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    Topology t{agent_count, std::move(edges)};
    const auto out = adjacency(t);
    for (int v = 0; v < agent_count; ++v) {
        const auto dist = bfs_distances(agent_count, out, v);
        for (int w = 0; w < agent_count; ++w) {
            if (dist[static_cast<size_t>(w)] < 0) {
                throw NotStronglyConnected(
                    "no directed path from agent " + std::to_string(v + 1) +
                        " to agent " + std::to_string(w + 1),
                    v + 1, w + 1);
            }
        }
    }
    return t;
}

int diameter(const Topology& t) {
    const auto out = adjacency(t);
    int worst = 0;
    for (int v = 0; v < t.agent_count; ++v) {
        const auto dist = bfs_distances(t.agent_count, out, v);
        for (int w = 0; w < t.agent_count; ++w)
            worst = std::max(worst, dist[static_cast<size_t>(w)]);
    }
    return worst;
}

ElectionState init_election(const std::vector<ConsensusTuple>& local) {
    if (local.empty()) throw EmptyCollective("no local tuples given");
    return ElectionState{local, 0};
}

void consensus_round(const Topology& t, ElectionState& state) {
    if (static_cast<int>(state.best.size()) != t.agent_count)
        throw DimensionMismatch("election state does not match the topology");
    // Synchronous semantics: everything sent this round is what each agent
    // held at the start of the round.
    const std::vector<ConsensusTuple> outbox = state.best;
    for (const auto& [from, to] : t.edges) {
        const ConsensusTuple& incoming = outbox[static_cast<size_t>(from - 1)];
        ConsensusTuple& held = state.best[static_cast<size_t>(to - 1)];
        if (tuple_less(incoming, held)) held = incoming;
    }
    ++state.round;
}

ElectionResult elect_best_performer(const Topology& t,
                                    const std::vector<ConsensusTuple>& local) {
    if (static_cast<int>(local.size()) != t.agent_count)
        throw DimensionMismatch("one tuple per agent required");
    ElectionState state = init_election(local);
    const int rounds = diameter(t);
    for (int k = 0; k < rounds; ++k) consensus_round(t, state);

    ElectionResult result;
    result.rounds_used = rounds;
    result.winner = state.best;
    result.elected.reserve(local.size());
    for (const auto& tup : state.best) result.elected.push_back(tup.id);
    return result;
}

CilcHistory run_cilc_distributed(const Topology& t,
                                 const Collective& collective,
                                 const Vector& u0, int trials,
                                 bool hold_on_no_improvement) {
    if (static_cast<int>(collective.laws.size()) != t.agent_count)
        throw DimensionMismatch("topology and collective disagree on M");
    if (trials < 1) throw DimensionMismatch("trials must be >= 1");

    const size_t M = collective.laws.size();
    CilcHistory history;
    history.trials.reserve(static_cast<size_t>(trials));

    std::vector<Vector> inputs(M, u0);
    for (int j = 0; j < trials; ++j) {
        CilcTrial trial;
        trial.trial = j;
        trial.agents.resize(M);
        std::vector<ConsensusTuple> local(M);
        for (size_t m = 0; m < M; ++m) {
            TrialRecord& rec = trial.agents[m];
            rec.trial = j;
            rec.u = inputs[m];
            rec.y = simulate_trial(collective.plant, inputs[m]);
            rec.e = collective.r - rec.y;
            rec.e_norm = rec.e.norm();
            local[m] = ConsensusTuple{rec.e_norm, static_cast<int>(m) + 1,
                                      rec.u, rec.e};
        }

        const ElectionResult election = elect_best_performer(t, local);
        // Every agent now holds the same winner tuple; use agent 1's copy.
        const ConsensusTuple& winner = election.winner.front();
        trial.best_performer = winner.id;
        trial.u_bar = winner.u;
        trial.e_bar = winner.e;
        trial.e_bar_norm = winner.norm;

        std::vector<Vector> next(M);
        for (size_t m = 0; m < M; ++m)
            next[m] = ilc_update(collective.laws[m], trial.u_bar, trial.e_bar);

        if (hold_on_no_improvement) {
            // Each agent evaluates its own candidate, then one more
            // min-consensus decides whether anyone improves.
            std::vector<ConsensusTuple> candidates(M);
            for (size_t m = 0; m < M; ++m) {
                const Vector e_next =
                    collective.r - simulate_trial(collective.plant, next[m]);
                candidates[m] = ConsensusTuple{e_next.norm(),
                                               static_cast<int>(m) + 1,
                                               Vector(), Vector()};
            }
            const ElectionResult check = elect_best_performer(t, candidates);
            if (!(check.winner.front().norm < trial.e_bar_norm)) {
                trial.held = true;
                next = inputs;
            }
        }

        inputs = std::move(next);
        history.trials.push_back(std::move(trial));
    }
    return history;
}

Topology load_topology(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("cannot open topology file: " + file.string());
    std::vector<std::pair<int, int>> edges;
    int declared_agents = 0;
    int max_id = 0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue; // blank or comment-only line
        if (first == "agents") {
            if (!(ss >> declared_agents) || declared_agents < 1)
                throw ConfigError("topology file line " +
                                  std::to_string(line_no) +
                                  ": bad agents header");
            continue;
        }
        int from = 0;
        int to = 0;
        try {
            from = std::stoi(first);
        } catch (...) {
            throw ConfigError("topology file line " + std::to_string(line_no) +
                              ": expected 'from to'");
        }
        if (!(ss >> to))
            throw ConfigError("topology file line " + std::to_string(line_no) +
                              ": expected 'from to'");
        edges.emplace_back(from, to);
        max_id = std::max({max_id, from, to});
    }
    const int agents = declared_agents > 0 ? declared_agents : max_id;
    if (agents < 1) throw ConfigError("topology file declares no agents");
    return build_topology(agents, std::move(edges));
}

} // namespace cilc
