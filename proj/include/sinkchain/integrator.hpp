#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace sinkchain {

// Dormand–Prince 5(4) embedded Runge–Kutta with first-same-as-last reuse and
// an elementwise mixed error norm  |err_i| / (absTol + relTol max(|y_i|, |y'_i|)).
//
// `Rhs` is any callable  void(const Vector& y, Vector& dydt)  (autonomous).
// The step size is carried across advance() calls; advance() lands exactly
// on the requested end time.
template <typename Rhs, typename Vector = Eigen::VectorXcd>
class DormandPrince45 {
 public:
  DormandPrince45(Rhs rhs, double relTol, double absTol, double initialStep)
      : rhs_(std::move(rhs)), relTol_(relTol), absTol_(absTol), h_(initialStep) {
    if (!(relTol > 0.0) || !(absTol > 0.0) || !(initialStep > 0.0))
      throw std::invalid_argument("DormandPrince45: tolerances and initial step must be positive");
  }

  void advance(double& t, double tEnd, Vector& y) {
    if (!haveDerivative_ || k1_.size() != y.size()) {
      rhs_(y, k1_);
      haveDerivative_ = true;
    }
    while (t < tEnd) {
      const double remaining = tEnd - t;
      const bool lastStep = h_ >= remaining;
      const double h = lastStep ? remaining : h_;
      const double error = trial_step(h, y);
      if (!std::isfinite(error)) throw std::runtime_error("DormandPrince45: non-finite error estimate");
      if (error <= 1.0) {
        t = lastStep ? tEnd : t + h;
        y.swap(yNew_);
        k1_.swap(k7_);
        ++accepted_;
        // Do not let a short final landing step shrink the carried step size.
        if (!lastStep || h == h_) h_ = h * growth(error);
      } else {
        ++rejected_;
        h_ = h * std::max(kMinFactor, kSafety * std::pow(error, -0.2));
      }
      if (h_ < kMinStep * std::max(1.0, std::abs(t)))
        throw std::runtime_error("DormandPrince45: step size underflow");
    }
  }

  double step_size() const { return h_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }

 private:
  static constexpr double kSafety = 0.9;
  static constexpr double kMinFactor = 0.2;
  static constexpr double kMaxFactor = 5.0;
  static constexpr double kMinStep = 64 * std::numeric_limits<double>::epsilon();

  static double growth(double error) {
    if (error == 0.0) return kMaxFactor;
    return std::clamp(kSafety * std::pow(error, -0.2), kMinFactor, kMaxFactor);
  }

  // Fills yNew_ and k7_ (derivative at yNew_); returns the scaled error norm.
  double trial_step(double h, const Vector& y) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    stage_ = y + h * a21 * k1_;
    rhs_(stage_, k2_);
    stage_ = y + h * (a31 * k1_ + a32 * k2_);
    rhs_(stage_, k3_);
    stage_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    rhs_(stage_, k4_);
    stage_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(stage_, k5_);
    stage_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(stage_, k6_);
    yNew_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    rhs_(yNew_, k7_);

    stage_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    const auto scale =
        (absTol_ + relTol_ * y.cwiseAbs().cwiseMax(yNew_.cwiseAbs()).array()).eval();
    return std::sqrt((stage_.cwiseAbs().array() / scale).square().mean());
  }

  Rhs rhs_;
  double relTol_;
  double absTol_;
  double h_;
  bool haveDerivative_ = false;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, stage_, yNew_;
};

}  // namespace sinkchain
