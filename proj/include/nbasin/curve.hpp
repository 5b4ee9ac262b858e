// SPDX-License-Identifier: Apache-2.0
//
// Backward extension of curves under the Newton map.
//
// A seed curve delta: [0,1] -> C with N(delta(1)) = delta(0) extends to
// gamma: [0, M) with N(gamma(t)) = gamma(t-1), tracked sample by sample via
// the local inverse branch (damped Newton on w -> N(w) - target). Exactly
// one of three terminal outcomes occurs: the parameter budget is reached
// (finite proxy for an infinite extension), the curve runs into a critical
// point of N, or it escapes to infinity and the point one parameter unit
// back is recorded.
//
// All unit segments share one global parameter set; adaptive midpoints are
// back-propagated through every earlier segment, so gamma(t-1) is always a
// stored sample and the functional equation holds at pullback tolerance.

#pragma once

#include "nbasin/function.hpp"

namespace nbasin {

struct CurveConfig {
    double seed_closure_tol = 1e-8;
    double pullback_tol = 1e-10; // relative to 1 + |target|
    double crit_guard = 1e-8;    // lower bound on |N'| along pullbacks
    double branch_floor = 1e-3;
    double initial_step = 1.0 / 64;
    int max_subdivisions = 12;
    int critical_persistence = 3;
    int pullback_budget = 64;
    double escape_radius = 1e6;
    double pole_guard = 1e-12;
};

struct CurveSample {
    double t = 0.0;
    Complex point{};
};

struct SeedCurve {
    std::vector<CurveSample> samples; // t ascending, t[0] = 0, t.back() = 1
};

struct SeedInvalid : std::runtime_error {
    std::string violated;
    SeedInvalid(const std::string& inv, const std::string& detail)
        : std::runtime_error("invalid seed curve, violated invariant: " + inv +
                             (detail.empty() ? "" : " (" + detail + ")")),
          violated(inv) {}
};

// Straight-line seed from N(z1) to z1; callers should validate_seed after.
SeedCurve make_backward_seed(const EntireFunction& fun, Complex z1, int samples = 9,
                             double pole_guard = 1e-12);

// Throws SeedInvalid naming the violated invariant.
void validate_seed(const EntireFunction& fun, const SeedCurve& seed, const CurveConfig& cfg);

enum class PullbackStatus : uint8_t { Ok, BranchLost, NoConvergence, NearCritical };

struct PullbackResult {
    PullbackStatus status = PullbackStatus::NoConvergence;
    Complex point{};
    int iterations = 0;
};

// Solves N(w) = target on the inverse branch through seed: damped Newton
// from seed, confined to |w - seed| <= branch_radius.
PullbackResult pull_back_point(const EntireFunction& fun, Complex target, Complex seed,
                               double branch_radius, const CurveConfig& cfg);

enum class ExtensionOutcome : uint8_t { BudgetReached, CriticalHit, EscapedToInfinity };

struct CurveExtension {
    std::vector<CurveSample> samples;
    ExtensionOutcome outcome = ExtensionOutcome::BudgetReached;
    Complex critical_point{};   // CriticalHit
    Complex asymptotic_value{}; // EscapedToInfinity: sample one unit back
    double t_max = 0.0;

    // Segment-aligned internal form: unit_params[i] in [0,1] and
    // segments[n][i] = gamma(n + unit_params[i]). Kept alongside the flat
    // samples so exact t/t-1 pairs are recoverable without float lookup.
    std::vector<double> unit_params;
    std::vector<std::vector<Complex>> segments;
};

CurveExtension extend_curve(const EntireFunction& fun, const SeedCurve& seed, double t_budget,
                            const CurveConfig& cfg);

// Zeros of N' near a box, found by deterministic secant sweeps from a
// coarse start grid; sorted by position, deduplicated.
std::vector<Complex> detect_critical_points(const EntireFunction& fun, Complex center,
                                            double extent, const CurveConfig& cfg,
                                            int start_grid = 16);

// max over samples with t >= 1 of |N(gamma(t)) - gamma(t-1)| / (1 + |gamma(t-1)|).
double max_functional_residual(const EntireFunction& fun, const CurveExtension& ext,
                               double pole_guard = 1e-12);

} // namespace nbasin
