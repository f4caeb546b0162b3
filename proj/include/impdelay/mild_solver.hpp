#pragma once

#include "impdelay/history.hpp"
#include "impdelay/problem.hpp"
#include "impdelay/trajectory.hpp"

namespace impdelay {

/// Mild solution of the impulsive delay initial value problem with u_0 = phi on
/// [0, t_end], by exponential time differencing on the commensurate grid.
///
/// Between impulses each step uses the exact per-mode weights of EtdWeights:
///  - ETD1 freezes F at the left end of the step;
///  - ETD2 interpolates F linearly in time (exponential trapezoidal rule), with
///    the end-of-step value obtained by an ETD1 predictor and fixed-point
///    corrector sweeps.
/// At an impulse node the sample is the left limit u(t_i) and the step continues
/// from u(t_i) + I_i(u(t_i)). A jump at t_end is recorded but not propagated.
///
/// The returned trajectory carries phi as its prefix.
Trajectory integrate_ivp(const ProblemSpec& problem, const HistorySegment& phi, double t_end,
                         const IntegratorConfig& cfg);

}  // namespace impdelay
