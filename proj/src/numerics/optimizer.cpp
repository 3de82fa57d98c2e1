#include "numerics/optimizer.hpp"

#include <cmath>
#include <sstream>

#include "common/error.hpp"

namespace agiqa::nn {

Adam::Adam(std::vector<Parameter*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
  if (!(config_.lr > 0.0)) fail(ErrorCode::kConfig, "learning rate must be > 0");
  if (!(config_.beta1 >= 0.0 && config_.beta1 < 1.0) || !(config_.beta2 >= 0.0 && config_.beta2 < 1.0)) {
    fail(ErrorCode::kConfig, "moment decays must lie in [0, 1)");
  }
  if (!(config_.eps > 0.0)) fail(ErrorCode::kConfig, "eps must be > 0");
  for (const Parameter* p : params_) {
    first_moment_.emplace_back(p->size(), 0.0);
    second_moment_.emplace_back(p->size(), 0.0);
  }
}

void Adam::step() {
  for (const Parameter* p : params_) {
    for (std::size_t i = 0; i < p->grad.size(); ++i) {
      if (!std::isfinite(p->grad[i])) {
        std::ostringstream msg;
        msg << "non-finite gradient " << p->grad[i] << " in parameter '" << p->name
            << "' at flat index " << i << " (step " << step_ + 1 << ")";
        fail(ErrorCode::kNumeric, msg.str());
      }
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double bc1 = 1.0 - std::pow(config_.beta1, t);
  const double bc2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Parameter& p = *params_[k];
    auto& m = first_moment_[k];
    auto& v = second_moment_[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double g = p.grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p.value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

void Adam::zero_grad() const {
  for (const Parameter* p : params_) p->zero_grad();
}

}  // namespace agiqa::nn
