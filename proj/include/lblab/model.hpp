#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lblab/errors.hpp"
#include "lblab/matrix.hpp"
#include "lblab/rng.hpp"

namespace lblab {

enum class Activation { relu, tanh };
enum class InitScheme { he, xavier };

inline const char* to_string(Activation a) {
  return a == Activation::relu ? "relu" : "tanh";
}
inline const char* to_string(InitScheme s) {
  return s == InitScheme::he ? "he" : "xavier";
}

/// Fully-connected architecture: layer_sizes runs from the input dimension
/// through the hidden widths to the class count. The output layer is always
/// softmax; `activation` applies to hidden layers only.
struct ModelSpec {
  std::vector<int> layer_sizes;
  Activation activation = Activation::relu;
  InitScheme init_scheme = InitScheme::he;

  void validate() const {
    if (layer_sizes.size() < 2)
      throw InvalidInputError("model spec: need at least 2 layer sizes (input, classes)");
    for (const int s : layer_sizes)
      if (s < 1)
        throw InvalidInputError("model spec: layer size " + std::to_string(s) + " < 1");
  }

  std::size_t n_layers() const { return layer_sizes.size() - 1; }  // weight layers
  int input_dim() const { return layer_sizes.front(); }
  int n_classes() const { return layer_sizes.back(); }
};

/// Multilayer perceptron over a single flat parameter buffer.
///
/// Layer l (0-based) owns a (out x in) row-major weight block followed by an
/// out-sized bias block; blocks are laid out layer by layer. The flat buffer
/// makes the optimizers, finite-difference checks, and hashing trivial.
class Mlp {
 public:
  explicit Mlp(ModelSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    offsets_.reserve(spec_.n_layers() + 1);
    std::size_t total = 0;
    for (std::size_t l = 0; l < spec_.n_layers(); ++l) {
      offsets_.push_back(total);
      total += layer_param_count(l);
    }
    offsets_.push_back(total);
    params_.assign(total, 0.0);
  }

  const ModelSpec& spec() const { return spec_; }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t n_params() const { return params_.size(); }

  std::size_t in_size(std::size_t layer) const {
    return static_cast<std::size_t>(spec_.layer_sizes[layer]);
  }
  std::size_t out_size(std::size_t layer) const {
    return static_cast<std::size_t>(spec_.layer_sizes[layer + 1]);
  }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + in_size(layer) * out_size(layer);
  }

  /// Class-probability rows: affine layers with the hidden activation, then a
  /// max-shifted softmax on the output logits. Each row sums to 1.
  Matrix forward(const Matrix& inputs) const {
    check_input(inputs);
    Matrix a = inputs;
    for (std::size_t l = 0; l < spec_.n_layers(); ++l) {
      Matrix z = affine(l, a);
      if (l + 1 < spec_.n_layers()) {
        apply_activation(z);
      } else {
        softmax_rows(z);
      }
      a = std::move(z);
    }
    return a;
  }

  /// Mean cross-entropy of the true labels (1-based) over the batch.
  double loss(const Matrix& inputs, std::span<const int> labels) const {
    const Matrix probs = forward(inputs);
    check_labels(labels, inputs.rows);
    double total = 0.0;
    for (std::size_t b = 0; b < inputs.rows; ++b) {
      const double p = probs.at(b, static_cast<std::size_t>(labels[b] - 1));
      total += -std::log(std::max(p, 1e-300));
    }
    return total / static_cast<double>(inputs.rows);
  }

  /// Gradient of `loss` with respect to every parameter, same layout as
  /// params(). Softmax + cross-entropy gives the output delta (p - y) / B.
  std::vector<double> backward(const Matrix& inputs, std::span<const int> labels) const {
    check_input(inputs);
    check_labels(labels, inputs.rows);
    const std::size_t n_layers = spec_.n_layers();
    const std::size_t batch = inputs.rows;

    // Forward pass keeping each layer's post-activation output.
    std::vector<Matrix> acts;
    acts.reserve(n_layers + 1);
    acts.push_back(inputs);
    for (std::size_t l = 0; l < n_layers; ++l) {
      Matrix z = affine(l, acts.back());
      if (l + 1 < n_layers) {
        apply_activation(z);
      } else {
        softmax_rows(z);
      }
      acts.push_back(std::move(z));
    }

    std::vector<double> grads(params_.size(), 0.0);
    Matrix delta = acts.back();  // starts as probabilities
    for (std::size_t b = 0; b < batch; ++b) {
      delta.at(b, static_cast<std::size_t>(labels[b] - 1)) -= 1.0;
      for (std::size_t j = 0; j < delta.cols; ++j)
        delta.at(b, j) /= static_cast<double>(batch);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const Matrix& a_prev = acts[l];
      const std::size_t in = in_size(l);
      const std::size_t out = out_size(l);
      double* gw = grads.data() + weight_offset(l);
      double* gb = grads.data() + bias_offset(l);
      const double* w = params_.data() + weight_offset(l);

      for (std::size_t b = 0; b < batch; ++b) {
        const auto d_row = delta.row(b);
        const auto a_row = a_prev.row(b);
        for (std::size_t j = 0; j < out; ++j) {
          const double d = d_row[j];
          if (d == 0.0) continue;
          double* gw_row = gw + j * in;
          for (std::size_t k = 0; k < in; ++k) gw_row[k] += d * a_row[k];
          gb[j] += d;
        }
      }

      if (l == 0) break;
      Matrix d_prev(batch, in);
      for (std::size_t b = 0; b < batch; ++b) {
        const auto d_row = delta.row(b);
        auto out_row = d_prev.row(b);
        for (std::size_t j = 0; j < out; ++j) {
          const double d = d_row[j];
          if (d == 0.0) continue;
          const double* w_row = w + j * in;
          for (std::size_t k = 0; k < in; ++k) out_row[k] += d * w_row[k];
        }
        // Chain through the hidden activation, using the cached output.
        const auto a_row = a_prev.row(b);
        if (spec_.activation == Activation::relu) {
          for (std::size_t k = 0; k < in; ++k)
            if (a_row[k] <= 0.0) out_row[k] = 0.0;
        } else {
          for (std::size_t k = 0; k < in; ++k) out_row[k] *= 1.0 - a_row[k] * a_row[k];
        }
      }
      delta = std::move(d_prev);
    }
    return grads;
  }

 private:
  std::size_t layer_param_count(std::size_t l) const {
    return in_size(l) * out_size(l) + out_size(l);
  }

  void check_input(const Matrix& inputs) const {
    if (inputs.cols != static_cast<std::size_t>(spec_.input_dim()))
      throw InvalidInputError("model: input has " + std::to_string(inputs.cols) +
                              " features, expected " + std::to_string(spec_.input_dim()));
    if (inputs.rows == 0) throw InvalidInputError("model: empty batch");
  }

  void check_labels(std::span<const int> labels, std::size_t batch) const {
    if (labels.size() != batch)
      throw InvalidInputError("model: " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(batch) + " rows");
    for (const int lab : labels)
      if (lab < 1 || lab > spec_.n_classes())
        throw InvalidInputError("model: label " + std::to_string(lab) + " outside {1.." +
                                std::to_string(spec_.n_classes()) + "}");
  }

  Matrix affine(std::size_t l, const Matrix& a) const {
    const std::size_t in = in_size(l);
    const std::size_t out = out_size(l);
    const double* w = params_.data() + weight_offset(l);
    const double* bias = params_.data() + bias_offset(l);
    Matrix z(a.rows, out);
    for (std::size_t b = 0; b < a.rows; ++b) {
      const auto a_row = a.row(b);
      auto z_row = z.row(b);
      for (std::size_t j = 0; j < out; ++j) {
        const double* w_row = w + j * in;
        double acc = bias[j];
        for (std::size_t k = 0; k < in; ++k) acc += w_row[k] * a_row[k];
        z_row[j] = acc;
      }
    }
    return z;
  }

  void apply_activation(Matrix& z) const {
    if (spec_.activation == Activation::relu) {
      for (double& v : z.data) v = v > 0.0 ? v : 0.0;
    } else {
      for (double& v : z.data) v = std::tanh(v);
    }
  }

  static void softmax_rows(Matrix& z) {
    for (std::size_t b = 0; b < z.rows; ++b) {
      auto row = z.row(b);
      double m = row[0];
      for (const double v : row) m = std::max(m, v);
      double sum = 0.0;
      for (double& v : row) {
        v = std::exp(v - m);
        sum += v;
      }
      for (double& v : row) v /= sum;
    }
  }

  ModelSpec spec_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;  // n_layers + 1 entries, last = total
};

/// Deterministic initialization: weights drawn layer by layer, row-major,
/// from a zero-mean normal scaled by fan-in (he: sqrt(2/fan_in), xavier:
/// sqrt(1/fan_in)); biases stay zero.
inline Mlp init_model(const ModelSpec& spec, std::uint64_t seed) {
  Mlp model(spec);
  Rng rng(seed);
  for (std::size_t l = 0; l < spec.n_layers(); ++l) {
    const auto fan_in = static_cast<double>(model.in_size(l));
    const double scale = spec.init_scheme == InitScheme::he ? std::sqrt(2.0 / fan_in)
                                                            : std::sqrt(1.0 / fan_in);
    double* w = model.params().data() + model.weight_offset(l);
    const std::size_t count = model.in_size(l) * model.out_size(l);
    for (std::size_t k = 0; k < count; ++k) w[k] = rng.normal(0.0, scale);
  }
  return model;
}

}  // namespace lblab
