#include "geppg/runlog.hpp"

namespace geppg {

void append_runlog(RunLog& head, const RunLog& tail) {
    head.evals.insert(head.evals.end(), tail.evals.begin(), tail.evals.end());
    if (tail.first_goal_step && (!head.first_goal_step || *tail.first_goal_step < *head.first_goal_step)) {
        head.first_goal_step = tail.first_goal_step;
    }
    head.env_steps += tail.env_steps;
    head.train_steps += tail.train_steps;
}

} // namespace geppg
