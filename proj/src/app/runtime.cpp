#include "tutor/app/runtime.hpp"

#include <spdlog/spdlog.h>

#include <cstdlib>

#include "tutor/llm/http_backend.hpp"
#include "tutor/llm/scripted_backend.hpp"

namespace tutor::app {

namespace {

resources::Resources make_resources(const AppConfig& c) {
    return c.data_dir ? resources::Resources(*c.data_dir) : resources::Resources();
}

}  // namespace

Runtime::Runtime(AppConfig c, resources::Resources res)
    : config(std::move(c)),
      resources(std::move(res)),
      lib(resources),
      data(pedagogy::PedagogyData::load(resources)),
      lexicon(embodiment::load_lexicon(resources.read("lexicon.toml"))),
      expressions(embodiment::ExpressionTable::from_toml(resources.read("expressions.toml"))) {}

std::unique_ptr<Runtime> Runtime::create(AppConfig config, const RuntimeOptions& options) {
    validate(config);
    auto res = make_resources(config);
    std::unique_ptr<Runtime> rt(new Runtime(std::move(config), std::move(res)));

    if (options.script) {
        rt->backend = std::make_unique<llm::ScriptedBackend>(llm::ScriptedBackend::load_script(*options.script));
    } else {
        std::optional<std::string> key;
        if (const char* v = std::getenv(rt->config.llm.api_key_env.c_str()); v && *v) key = v;
        if (!key) spdlog::warn("{} is not set; requests go out without an API key", rt->config.llm.api_key_env);
        rt->backend = std::make_unique<llm::HttpBackend>(rt->config.llm, key);
    }

    if (options.fixed_clock_start) {
        rt->clock = std::make_unique<SteppingClock>(*options.fixed_clock_start, options.fixed_clock_step);
    } else {
        rt->clock = std::make_unique<SystemClock>();
    }

    if (rt->config.memory_path) rt->memory = std::make_unique<memory::JsonlMemoryStore>(*rt->config.memory_path);
    return rt;
}

workflow::Deps Runtime::deps_for(const LearnerProfile& profile) {
    workflow::Deps deps{lib, *backend, data, *clock, &lexicon, std::nullopt, config.session.token_window_budget,
                        config.gates};
    if (memory) {
        if (auto recalled = memory::recall(*memory, profile.learner_id, config.recall_k)) {
            deps.memory_summary = lib.directive("recall_header") + "\n" + *recalled;
        }
    }
    return deps;
}

}  // namespace tutor::app
