#pragma once

#include <Eigen/Dense>
#include <span>
#include <stdexcept>

#include "stucco/geometry.hpp"

namespace stucco {

/// Estimated external wrench at the end-effector: planar force plus torque
/// about the end-effector frame origin.
struct Wrench2 {
    double fx = 0.0;
    double fy = 0.0;
    double tau = 0.0;

    Eigen::Vector3d vec() const { return {fx, fy, tau}; }
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Residual precision matrix plus detection gate.
struct ResidualModel {
    Eigen::Matrix3d precision = Eigen::Matrix3d::Identity();
    double threshold = 1.0;
};

/// Number of noise standard deviations a residual must exceed, along any
/// direction of the calibrated noise ellipsoid, before a configured threshold
/// of 1 reports contact. The calibrated gate is threshold * kSigmaGate^2.
inline constexpr double kSigmaGate = 3.0;

/// Fits the precision matrix as the regularized inverse sample covariance of
/// free-space residuals and derives the detection gate from the configured
/// threshold. Throws CalibrationError if the covariance is singular.
ResidualModel calibrate_precision(std::span<const Wrench2> free_space_residuals,
                                  double configured_threshold = 1.0);

/// Eq.-style quadratic-form test: true iff gamma' * precision * gamma strictly
/// exceeds the model threshold.
bool detect_contact(const Wrench2& gamma, const ResidualModel& model);

struct IsolationResult {
    Point2 point;          // world frame, on the shape boundary
    bool fallback = false; // true when no torque-balance intersection admitted the force
};

/// Closed-form planar hard-finger isolation: finds the boundary point r with
/// r x f = tau (link frame) where the force points into the body. When no
/// intersection qualifies, falls back to the boundary point nearest the
/// torque-balance line and flags it.
IsolationResult isolate_contact(const Wrench2& gamma, const Pose2& pose, const Shape& shape);

}  // namespace stucco
