#pragma once

#include <filesystem>
#include <memory>
#include <optional>

#include "tutor/app/config.hpp"
#include "tutor/core/clock.hpp"
#include "tutor/embodiment/emotion.hpp"
#include "tutor/llm/backend.hpp"
#include "tutor/memory/store.hpp"
#include "tutor/pedagogy/data.hpp"
#include "tutor/prompt/templates.hpp"
#include "tutor/resources/resources.hpp"
#include "tutor/workflow/runner.hpp"

namespace tutor::app {

struct RuntimeOptions {
    std::optional<std::filesystem::path> script;  // scripted backend instead of HTTP
    std::optional<TimePoint> fixed_clock_start;   // deterministic stepping clock
    std::chrono::milliseconds fixed_clock_step{250};
};

// Everything sessions share: data tables, the model backend, the clock and
// the long-term memory store.
struct Runtime {
    AppConfig config;
    resources::Resources resources;
    prompt::PromptLibrary lib;
    pedagogy::PedagogyData data;
    embodiment::Lexicon lexicon;
    embodiment::ExpressionTable expressions;
    std::unique_ptr<llm::ChatBackend> backend;
    std::unique_ptr<Clock> clock;
    std::unique_ptr<memory::MemoryStore> memory;

    // Throws ConfigError for bad data files or backend settings.
    static std::unique_ptr<Runtime> create(AppConfig config, const RuntimeOptions& options = {});

    // Deps for one session; recalls the learner's earlier summaries.
    workflow::Deps deps_for(const LearnerProfile& profile);

private:
    Runtime(AppConfig config, resources::Resources res);
};

}  // namespace tutor::app
