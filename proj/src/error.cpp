#include "rwos/error.hpp"

namespace rwos {

const char* status_name(Status s) noexcept {
    switch (s) {
    case Status::ok: return "ok";
    case Status::invalid_argument: return "invalid argument";
    case Status::inconsistent: return "inconsistent input";
    case Status::not_converged: return "not converged";
    case Status::io_error: return "i/o error";
    case Status::internal: return "internal error";
    }
    return "unknown";
}

}  // namespace rwos
