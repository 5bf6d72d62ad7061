#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tutor::resources {

// Read-only view over the data tree (prompts/, *.toml). Files are compiled
// into the binary; an override directory, when set, shadows them file by
// file.
class Resources {
public:
    Resources() = default;
    explicit Resources(std::filesystem::path override_dir);

    // Throws ConfigError when the file exists in neither location.
    std::string read(std::string_view relative_path) const;
    bool contains(std::string_view relative_path) const;

    // Sorted relative paths directly or transitively under `prefix`.
    std::vector<std::string> list(std::string_view prefix) const;

    const std::optional<std::filesystem::path>& override_dir() const { return override_dir_; }

private:
    std::optional<std::filesystem::path> override_dir_;
};

}  // namespace tutor::resources
