#pragma once

#include <stdexcept>
#include <string>

namespace hypercyc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EncodingError : Error { using Error::Error; };
struct CapacityError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct EmbeddingError : Error { using Error::Error; };
struct DegenerateRestrictionError : Error { using Error::Error; };
struct StageError : Error {
  explicit StageError(const std::string& what, std::string history_json = {})
      : Error(what), history(std::move(history_json)) {}
  std::string history;  // stage records completed before the failure
};
struct ConfigError : Error { using Error::Error; };

struct TowerError : Error {
  TowerError(const std::string& what, int suggested)
      : Error(what), suggested_marker(suggested) {}
  int suggested_marker;
};

}  // namespace hypercyc
