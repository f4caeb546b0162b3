#pragma once

#include "impdelay/problem.hpp"

namespace impdelay::detail {

/// F(t, x, phi) with a dimension and finiteness check; throws NumericFailure at t.
Eigen::VectorXd evaluate(const Nonlinearity& f, double t, const StateVector& x,
                         const HistorySegment& phi);

}  // namespace impdelay::detail
