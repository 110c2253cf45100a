#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lblab/errors.hpp"

namespace lblab {

enum class OptimizerKind { sgd, adam, rmsprop };

inline const char* to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::rmsprop: return "rmsprop";
  }
  return "?";
}

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::sgd;
  double learning_rate = 0.01;
  double momentum = 0.0;  // sgd
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;   // adam
  double rho = 0.9;       // rmsprop
  double epsilon = 1e-8;  // adam, rmsprop

  /// Conventional defaults per kind: sgd lr 0.01, adam lr 0.001, rmsprop lr 0.001.
  static OptimizerSpec defaults(OptimizerKind kind) {
    OptimizerSpec s;
    s.kind = kind;
    s.learning_rate = kind == OptimizerKind::sgd ? 0.01 : 0.001;
    return s;
  }

  void validate() const {
    // Zero is allowed as a degenerate "frozen model" case.
    if (!(learning_rate >= 0.0))
      throw InvalidInputError("optimizer: learning_rate must be >= 0");
    if (!(momentum >= 0.0 && momentum < 1.0))
      throw InvalidInputError("optimizer: momentum must be in [0, 1)");
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0))
      throw InvalidInputError("optimizer: beta1 and beta2 must be in (0, 1)");
    if (!(rho > 0.0 && rho < 1.0))
      throw InvalidInputError("optimizer: rho must be in (0, 1)");
    if (!(epsilon > 0.0)) throw InvalidInputError("optimizer: epsilon must be > 0");
  }
};

/// Per-parameter accumulators. Zero-initialized on the first step; `m` holds
/// the SGD velocity or Adam first moment, `v` the Adam second moment or the
/// RMSprop squared-gradient average.
struct OptimizerState {
  std::size_t step_count = 0;
  std::vector<double> m;
  std::vector<double> v;
};

/// One in-place update of `params` by `grads`.
///
///   sgd      p -= lr * g, or with momentum u: vel = u*vel + g, p -= lr*vel
///   adam     bias-corrected moments, p -= lr * m_hat / (sqrt(v_hat) + eps)
///   rmsprop  s = rho*s + (1-rho)*g^2, p -= lr * g / sqrt(s + eps)
inline void optimizer_step(std::span<double> params, std::span<const double> grads,
                           const OptimizerSpec& spec, OptimizerState& state) {
  spec.validate();
  if (params.size() != grads.size())
    throw InvalidInputError("optimizer_step: " + std::to_string(grads.size()) +
                            " gradients for " + std::to_string(params.size()) +
                            " parameters");
  const std::size_t n = params.size();
  const bool needs_m = spec.kind == OptimizerKind::adam ||
                       (spec.kind == OptimizerKind::sgd && spec.momentum > 0.0);
  const bool needs_v = spec.kind != OptimizerKind::sgd;
  if (needs_m && state.m.empty()) state.m.assign(n, 0.0);
  if (needs_v && state.v.empty()) state.v.assign(n, 0.0);
  if ((needs_m && state.m.size() != n) || (needs_v && state.v.size() != n))
    throw InvalidInputError("optimizer_step: state size does not match parameters");

  ++state.step_count;
  const double lr = spec.learning_rate;

  switch (spec.kind) {
    case OptimizerKind::sgd: {
      if (spec.momentum > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          state.m[i] = spec.momentum * state.m[i] + grads[i];
          params[i] -= lr * state.m[i];
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) params[i] -= lr * grads[i];
      }
      break;
    }
    case OptimizerKind::adam: {
      const auto t = static_cast<double>(state.step_count);
      const double corr1 = 1.0 - std::pow(spec.beta1, t);
      const double corr2 = 1.0 - std::pow(spec.beta2, t);
      for (std::size_t i = 0; i < n; ++i) {
        state.m[i] = spec.beta1 * state.m[i] + (1.0 - spec.beta1) * grads[i];
        state.v[i] = spec.beta2 * state.v[i] + (1.0 - spec.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / corr1;
        const double v_hat = state.v[i] / corr2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + spec.epsilon);
      }
      break;
    }
    case OptimizerKind::rmsprop: {
      for (std::size_t i = 0; i < n; ++i) {
        state.v[i] = spec.rho * state.v[i] + (1.0 - spec.rho) * grads[i] * grads[i];
        params[i] -= lr * grads[i] / std::sqrt(state.v[i] + spec.epsilon);
      }
      break;
    }
  }
}

}  // namespace lblab
