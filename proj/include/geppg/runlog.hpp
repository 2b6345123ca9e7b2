#ifndef GEPPG_RUNLOG_HPP
#define GEPPG_RUNLOG_HPP

#include "geppg/controller.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace geppg {

/// Periodic offline evaluation of a checkpointed policy.
struct EvalRecord {
    Index env_step = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
    Index episodes = 0;
    std::vector<double> returns;
    std::shared_ptr<const Controller> policy;
    /// Name of the checkpoint file once written, e.g. "checkpoints/step_0000002000.bin".
    std::string policy_ref;
    std::string phase;
};

using EvalHook = std::function<void(EvalRecord&)>;

struct RunLog {
    std::vector<EvalRecord> evals;
    std::optional<Index> first_goal_step;
    /// Environment steps spent by exploration (evaluation episodes excluded).
    Index env_steps = 0;
    Index train_steps = 0;
    /// Env step at which the second phase of a two-phase run started.
    std::optional<Index> phase_boundary;

    bool goal_reached() const { return first_goal_step.has_value(); }
    bool goal_reached_by(Index step) const { return first_goal_step && *first_goal_step <= step; }
};

/// Appends `tail` to `head`, keeping the earliest first-goal step.
void append_runlog(RunLog& head, const RunLog& tail);

} // namespace geppg

#endif
