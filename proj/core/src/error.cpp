#include "demandcast/error.hpp"

namespace demandcast {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::Input: return "input error";
        case ErrorKind::InsufficientData: return "insufficient data";
        case ErrorKind::Numerical: return "numerical failure";
    }
    return "unknown error";
}

void throw_error(ErrorKind kind, const std::string& what) {
    switch (kind) {
        case ErrorKind::InvalidArgument: throw InvalidArgument(what);
        case ErrorKind::Input: throw InputError(what);
        case ErrorKind::InsufficientData: throw InsufficientData(what);
        case ErrorKind::Numerical: break;
    }
    throw NumericalError(what);
}

}  // namespace demandcast
