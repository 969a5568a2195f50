#include "detree/errors.hpp"

namespace detree {

std::string_view category_name(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Usage: return "usage";
    case ErrorCategory::Data: return "data";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Numeric: return "numeric";
  }
  return "unknown";
}

int exit_code(ErrorCategory c) noexcept {
  switch (c) {
    case ErrorCategory::Usage: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Config:
    case ErrorCategory::Numeric: return 4;
  }
  return 1;
}

}  // namespace detree
