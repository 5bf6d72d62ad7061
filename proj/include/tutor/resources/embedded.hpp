#pragma once

#include <cstddef>
#include <string_view>

namespace tutor::resources::detail {

struct EmbeddedFile {
    std::string_view path;
    std::string_view data;
};

extern const EmbeddedFile kEmbeddedFiles[];
extern const std::size_t kEmbeddedFileCount;

}  // namespace tutor::resources::detail
