#include "impdelay/errors.hpp"

namespace impdelay {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::not_exponentially_stable: return "not-exponentially-stable";
        case ErrorKind::configuration: return "configuration";
        case ErrorKind::numeric_failure: return "numeric-failure";
        case ErrorKind::non_convergence: return "non-convergence";
        case ErrorKind::unsupported_configuration: return "unsupported-configuration";
        case ErrorKind::internal_consistency: return "internal-consistency";
    }
    return "unknown";
}

void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string what = context + ": " + e.what();
    switch (e.kind()) {
        case ErrorKind::invalid_input: throw InvalidInput(what);
        case ErrorKind::not_exponentially_stable: throw NotExponentiallyStable(what);
        case ErrorKind::configuration: throw ConfigurationError(what);
        case ErrorKind::unsupported_configuration: throw UnsupportedConfiguration(what);
        case ErrorKind::internal_consistency: throw InternalConsistencyError(what);
        case ErrorKind::numeric_failure: {
            const auto* nf = dynamic_cast<const NumericFailure*>(&e);
            throw NumericFailure(what, nf ? nf->time() : 0.0);
        }
        case ErrorKind::non_convergence: {
            const auto* nc = dynamic_cast<const NonConvergence*>(&e);
            throw NonConvergence(what, nc ? nc->iterations() : 0, nc ? nc->last_ratio() : 0.0);
        }
    }
    throw Error(e.kind(), what);
}

}  // namespace impdelay
