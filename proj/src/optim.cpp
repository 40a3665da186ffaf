#include "csib/optim.hpp"

#include "csib/util.hpp"

namespace csib {

void sgd_step(std::span<double> params, std::span<const double> grads,
              OptimizerState& state, const std::string& name) {
  require(params.size() == grads.size(),
          "sgd_step(" + name + "): params/grads shape mismatch");
  require(params.size() == state.velocity.size(),
          "sgd_step(" + name + "): velocity shape mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i)
    require(is_finite(grads[i]),
            "sgd_step(" + name + "): non-finite gradient at index " +
                std::to_string(i));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.velocity[i] = state.momentum * state.velocity[i] + grads[i];
    params[i] -= state.learning_rate * state.velocity[i];
  }
}

double learning_rate_schedule(double base_lr, std::size_t step,
                              std::span<const std::size_t> decay_steps,
                              double decay_factor) {
  double lr = base_lr;
  for (std::size_t d : decay_steps)
    if (d <= step) lr /= decay_factor;
  return lr;
}

std::vector<double> finite_diff_grad(const ScalarFn& f, std::span<const double> x,
                                     double eps) {
  require(eps > 0.0, "finite_diff_grad: eps must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + eps;
    const double hi = f(point);
    point[i] = saved - eps;
    const double lo = f(point);
    point[i] = saved;
    require(is_finite(hi) && is_finite(lo),
            "finite_diff_grad: function returned non-finite value at coordinate " +
                std::to_string(i));
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

}  // namespace csib
