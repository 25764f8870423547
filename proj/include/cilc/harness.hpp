#pragma once

#include <filesystem>
#include <iosfwd>

#include "cilc/scenario.hpp"

namespace cilc {

/// Options shared by every subcommand; flags override the config file.
struct HarnessOptions {
    std::optional<std::filesystem::path> config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> trials;
    bool hold = false;
    bool distributed = false;
    std::optional<std::filesystem::path> topology_file;
};

/// Exit codes: 0 success, 2 config error, 3 numerical blowup.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;

/// Appendix-A reproduction: contraction loci, error-norm progressions
/// (isolated vs CILC) and the certificate report, each as CSV + SVG (+ a
/// JSON/text report).
int cmd_appendix_a(const HarnessOptions& opts, std::ostream& log);

/// The simulation study: nominal-design/perturbed-truth pipeline, three
/// isolated agents and the four collectives, error norms and election
/// sequences as CSV + SVG.
int cmd_twipr(const HarnessOptions& opts, std::ostream& log);

/// Certificate report (per-agent and collective) for a configured
/// collective.
int cmd_certify(const HarnessOptions& opts, std::ostream& log);

/// F_j^m table and the well-performing verdict.
int cmd_perf_eval(const HarnessOptions& opts, std::ostream& log);

/// Election trace on the configured topology plus the
/// centralized/distributed equivalence check.
int cmd_consensus(const HarnessOptions& opts, std::ostream& log);

} // namespace cilc
