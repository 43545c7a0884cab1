#include "semtour/error.hpp"

#include <utility>

namespace semtour {

Error::Error(ErrorCode code, const std::string& message, std::map<std::string, std::string> detail)
    : std::runtime_error(std::string(enum_name(code)) + ": " + message),
      code_(code),
      message_(message),
      detail_(std::move(detail)) {}

void fail(ErrorCode code, const std::string& message, std::map<std::string, std::string> detail) {
    throw Error(code, message, std::move(detail));
}

}  // namespace semtour
