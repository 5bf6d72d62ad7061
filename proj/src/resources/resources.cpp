#include "tutor/resources/resources.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tutor/core/errors.hpp"
#include "tutor/resources/embedded.hpp"

namespace tutor::resources {

namespace fs = std::filesystem;

namespace {

std::optional<std::string_view> find_embedded(std::string_view path) {
    for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i) {
        if (detail::kEmbeddedFiles[i].path == path) return detail::kEmbeddedFiles[i].data;
    }
    return std::nullopt;
}

}  // namespace

Resources::Resources(fs::path override_dir) : override_dir_(std::move(override_dir)) {}

std::string Resources::read(std::string_view relative_path) const {
    if (override_dir_) {
        auto p = *override_dir_ / fs::path(relative_path);
        if (fs::is_regular_file(p)) {
            std::ifstream in(p, std::ios::binary);
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
    }
    if (auto data = find_embedded(relative_path)) return std::string(*data);
    throw ConfigError("data file not found: " + std::string(relative_path));
}

bool Resources::contains(std::string_view relative_path) const {
    if (override_dir_ && fs::is_regular_file(*override_dir_ / fs::path(relative_path))) return true;
    return find_embedded(relative_path).has_value();
}

std::vector<std::string> Resources::list(std::string_view prefix) const {
    std::set<std::string> paths;
    for (std::size_t i = 0; i < detail::kEmbeddedFileCount; ++i) {
        auto p = detail::kEmbeddedFiles[i].path;
        if (p.substr(0, prefix.size()) == prefix) paths.emplace(p);
    }
    if (override_dir_) {
        auto root = *override_dir_ / fs::path(prefix);
        if (fs::is_directory(root)) {
            for (const auto& entry : fs::recursive_directory_iterator(root)) {
                if (!entry.is_regular_file()) continue;
                paths.insert(fs::relative(entry.path(), *override_dir_).generic_string());
            }
        }
    }
    return {paths.begin(), paths.end()};
}

}  // namespace tutor::resources
