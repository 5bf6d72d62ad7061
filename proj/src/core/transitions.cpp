#include "tutor/core/transitions.hpp"

#include <algorithm>

namespace tutor {

namespace {

using P = TaskPhase;

constexpr std::pair<P, P> kForwardEdges[] = {
    {P::Introduction, P::Assessment},
    {P::Assessment, P::ScenarioSelection},
    {P::ScenarioSelection, P::RolePlay},
    {P::RolePlay, P::Feedback},
    {P::Feedback, P::ScenarioSelection},
    {P::RolePlay, P::ScenarioSelection},
};

}  // namespace

bool validate_transition(TaskPhase from, TaskPhase to) {
    if (to == P::Ended) return true;
    return std::any_of(std::begin(kForwardEdges), std::end(kForwardEdges),
                       [&](const auto& e) { return e.first == from && e.second == to; });
}

std::vector<std::pair<TaskPhase, TaskPhase>> transition_edges() {
    std::vector<std::pair<TaskPhase, TaskPhase>> edges(std::begin(kForwardEdges),
                                                       std::end(kForwardEdges));
    for (auto p : kAllPhases) edges.emplace_back(p, P::Ended);
    return edges;
}

std::optional<TaskPhase> forward_phase(TaskPhase phase) {
    switch (phase) {
        case P::Introduction: return P::Assessment;
        case P::Assessment: return P::ScenarioSelection;
        case P::RolePlay: return P::Feedback;
        default: return std::nullopt;
    }
}

}  // namespace tutor
