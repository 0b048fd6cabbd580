#pragma once

#include <cmath>
#include <vector>

#include "sccd/errors.hpp"
#include "sccd/tensor.hpp"

namespace sccd {

struct AdamConfig {
  double lr = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a fixed parameter list. Moment estimates
/// mirror parameter shapes; step() consumes the gradients currently stored on
/// the parameters and throws training_error on non-finite gradients.
class Adam {
 public:
  Adam(std::vector<TensorPtr> params, AdamConfig cfg = {})
      : params_(std::move(params)), cfg_(cfg) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t p = 0; p < params_.size(); ++p) {
      m_[p].assign(params_[p]->data.size(), 0.0);
      v_[p].assign(params_[p]->data.size(), 0.0);
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params_.size(); ++p) {
      Tensor& par = *params_[p];
      if (par.grad.empty()) par.ensure_grad();
      for (std::size_t i = 0; i < par.data.size(); ++i) {
        const double g = par.grad[i];
        if (!std::isfinite(g))
          throw training_error("non-finite gradient in parameter " +
                               std::to_string(p) + " element " +
                               std::to_string(i) + " at step " +
                               std::to_string(t_));
        m_[p][i] = cfg_.beta1 * m_[p][i] + (1.0 - cfg_.beta1) * g;
        v_[p][i] = cfg_.beta2 * v_[p][i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m_[p][i] / bc1;
        const double vhat = v_[p][i] / bc2;
        par.data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  void zero_grad() {
    for (auto& p : params_) p->zero_grad();
  }

  long steps_taken() const { return t_; }
  const std::vector<TensorPtr>& params() const { return params_; }

 private:
  std::vector<TensorPtr> params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  long t_ = 0;
};

}  // namespace sccd
