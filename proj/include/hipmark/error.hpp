#pragma once

#include <stdexcept>
#include <string>

namespace hipmark {

enum class ErrorCategory {
    contract,
    dimension,
    config,
    data,
    format,
    numeric,
    io,
    generation,
};

const char* category_name(ErrorCategory category);

// Process exit code for a category: 2 config, 3 data, 4 format, 5 numeric abort.
int exit_code(ErrorCategory category);

class Error : public std::runtime_error {
   public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

   private:
    ErrorCategory category_;
};

struct ContractError : Error {
    explicit ContractError(const std::string& w) : Error(ErrorCategory::contract, w) {}
};
struct DimensionError : Error {
    explicit DimensionError(const std::string& w) : Error(ErrorCategory::dimension, w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCategory::config, w) {}
};
struct DataError : Error {
    explicit DataError(const std::string& w) : Error(ErrorCategory::data, w) {}
};
struct FormatError : Error {
    explicit FormatError(const std::string& w) : Error(ErrorCategory::format, w) {}
};
/// A structurally valid checkpoint that lacks (or mis-shapes) tensors the model needs.
struct IncompleteCheckpointError : FormatError {
    explicit IncompleteCheckpointError(const std::string& w) : FormatError(w) {}
};
struct NumericError : Error {
    explicit NumericError(const std::string& w) : Error(ErrorCategory::numeric, w) {}
};
struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCategory::io, w) {}
};
struct GenerationError : Error {
    explicit GenerationError(const std::string& w) : Error(ErrorCategory::generation, w) {}
};

}  // namespace hipmark
