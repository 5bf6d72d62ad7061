#pragma once

#include <utility>
#include <vector>

#include "tutor/core/types.hpp"

namespace tutor {

// Phase graph of a tutoring session:
//   Introduction -> Assessment -> ScenarioSelection -> RolePlay -> Feedback
//   Feedback -> ScenarioSelection   (another round)
//   RolePlay -> ScenarioSelection   (learner switches role-play)
//   any -> Ended
bool validate_transition(TaskPhase from, TaskPhase to);

std::vector<std::pair<TaskPhase, TaskPhase>> transition_edges();

// Successor reached by saturation, if the phase has one.
std::optional<TaskPhase> forward_phase(TaskPhase phase);

}  // namespace tutor
