#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace csib {

// Classical SGD momentum: velocity accumulates the raw gradient and the
// parameter moves against the velocity.
struct OptimizerState {
  std::vector<double> velocity;
  double learning_rate = 0.0;
  double momentum = 0.0;

  OptimizerState() = default;
  OptimizerState(std::size_t n, double lr, double mom)
      : velocity(n, 0.0), learning_rate(lr), momentum(mom) {}
};

// velocity <- momentum*velocity + grads; params <- params - lr*velocity.
// `name` identifies the parameter in error messages.
void sgd_step(std::span<double> params, std::span<const double> grads,
              OptimizerState& state, const std::string& name);

// base_lr divided by decay_factor once per decay step already reached.
double learning_rate_schedule(double base_lr, std::size_t step,
                              std::span<const std::size_t> decay_steps,
                              double decay_factor);

using ScalarFn = std::function<double(std::span<const double>)>;

// Central-difference gradient estimate, one coordinate at a time.
std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> x,
                                     double eps);

}  // namespace csib
