#pragma once

#include <stdexcept>
#include <string>

namespace staf {

// A file or payload does not match the expected on-disk format.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// A dataset directory is missing, empty, or otherwise unreadable.
class IngestionError : public std::runtime_error {
 public:
  explicit IngestionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace staf
