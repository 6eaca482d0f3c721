#include "matern/error.hpp"

namespace matern {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::UnsupportedGradient: return "unsupported gradient";
        case ErrorKind::SingularSystem: return "singular system";
        case ErrorKind::Capacity: return "capacity exceeded";
        case ErrorKind::IterativeFailure: return "iterative solver failure";
        case ErrorKind::EmptySurface: return "empty surface";
        case ErrorKind::Numeric: return "numeric failure";
        case ErrorKind::Parse: return "parse error";
        case ErrorKind::Io: return "io error";
    }
    return "error";
}

}  // namespace matern
