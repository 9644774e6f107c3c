#include "hipmark/error.hpp"

namespace hipmark {

const char* category_name(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::contract: return "contract";
        case ErrorCategory::dimension: return "dimension";
        case ErrorCategory::config: return "config";
        case ErrorCategory::data: return "data";
        case ErrorCategory::format: return "format";
        case ErrorCategory::numeric: return "numeric";
        case ErrorCategory::io: return "io";
        case ErrorCategory::generation: return "generation";
    }
    return "unknown";
}

int exit_code(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::data:
        case ErrorCategory::io:
        case ErrorCategory::generation: return 3;
        case ErrorCategory::format: return 4;
        case ErrorCategory::numeric: return 5;
        case ErrorCategory::contract:
        case ErrorCategory::dimension: return 1;
    }
    return 1;
}

}  // namespace hipmark
