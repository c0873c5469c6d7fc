#pragma once

// Dense multilayer perceptron with hand-rolled reverse-mode gradients and an
// Adam optimizer. Batched evaluation uses Eigen matrix products; rows are
// samples. Hidden layers share one nonlinearity, the output layer is linear.

#include "ctsim/rng.hpp"
#include "ctsim/types.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ctsim {

enum class Activation { softplus, relu, tanh };

// Default is softplus: a smooth rectifier, so analytic gradients agree with
// finite differences everywhere (relu kinks break that check).
struct MlpParams {
  std::vector<MatX> weights;  // weights[l] is (out x in)
  std::vector<VecX> biases;
  Activation activation = Activation::softplus;

  int in_dim() const { return static_cast<int>(weights.front().cols()); }
  int out_dim() const { return static_cast<int>(weights.back().rows()); }
  int layer_count() const { return static_cast<int>(weights.size()); }
};

inline MlpParams mlp_init(int in_dim, const std::vector<int>& hidden,
                          int out_dim, Rng& rng,
                          Activation act = Activation::softplus) {
  MlpParams p;
  p.activation = act;
  std::vector<int> dims;
  dims.push_back(in_dim);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out_dim);
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
    MatX w(dims[l + 1], dims[l]);
    for (int r = 0; r < w.rows(); ++r)
      for (int c = 0; c < w.cols(); ++c) w(r, c) = uniform(rng, -bound, bound);
    VecX b(dims[l + 1]);
    for (int r = 0; r < b.size(); ++r) b[r] = uniform(rng, -bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

namespace act {

inline double forward(Activation a, double x) {
  switch (a) {
    case Activation::relu:
      return x > 0 ? x : 0;
    case Activation::tanh:
      return std::tanh(x);
    case Activation::softplus:
    default:
      // Stable softplus: max(x,0) + log1p(exp(-|x|)).
      return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  }
}

inline double derivative(Activation a, double pre) {
  switch (a) {
    case Activation::relu:
      return pre > 0 ? 1.0 : 0.0;
    case Activation::tanh: {
      double t = std::tanh(pre);
      return 1.0 - t * t;
    }
    case Activation::softplus:
    default:
      return 1.0 / (1.0 + std::exp(-pre));
  }
}

}  // namespace act

struct MlpCache {
  MatX input;             // B x in
  std::vector<MatX> pre;  // pre-activation per layer, B x width
  std::vector<MatX> post; // post-activation (output layer stays linear)
};

inline MatX mlp_forward(const MlpParams& p, const MatX& input,
                        MlpCache* cache = nullptr) {
  if (input.cols() != p.in_dim())
    throw std::invalid_argument("mlp_forward: input dimension mismatch");
  if (cache) {
    cache->input = input;
    cache->pre.clear();
    cache->post.clear();
  }
  MatX x = input;
  for (int l = 0; l < p.layer_count(); ++l) {
    MatX z = x * p.weights[l].transpose();
    z.rowwise() += p.biases[l].transpose();
    bool last = (l == p.layer_count() - 1);
    MatX y;
    if (last) {
      y = z;
    } else {
      y = z.unaryExpr(
          [&](double v) { return act::forward(p.activation, v); });
    }
    if (cache) {
      cache->pre.push_back(z);
      cache->post.push_back(y);
    }
    x = std::move(y);
  }
  return x;
}

struct MlpGrads {
  std::vector<MatX> d_weights;
  std::vector<VecX> d_biases;
  MatX d_input;  // B x in

  MlpGrads& operator+=(const MlpGrads& o) {
    for (size_t l = 0; l < d_weights.size(); ++l) {
      d_weights[l] += o.d_weights[l];
      d_biases[l] += o.d_biases[l];
    }
    d_input += o.d_input;
    return *this;
  }
  MlpGrads& operator*=(double s) {
    for (size_t l = 0; l < d_weights.size(); ++l) {
      d_weights[l] *= s;
      d_biases[l] *= s;
    }
    d_input *= s;
    return *this;
  }
};

inline MlpGrads mlp_zero_grads(const MlpParams& p) {
  MlpGrads g;
  for (int l = 0; l < p.layer_count(); ++l) {
    g.d_weights.emplace_back(MatX::Zero(p.weights[l].rows(), p.weights[l].cols()));
    g.d_biases.emplace_back(VecX::Zero(p.biases[l].size()));
  }
  g.d_input = MatX();
  return g;
}

// Reverse pass. d_output is dL/dY (B x out). Set param_grads=false when only
// the input gradient is needed (e.g. dQ/da inside the policy update).
inline MlpGrads mlp_backward(const MlpParams& p, const MlpCache& cache,
                             const MatX& d_output, bool param_grads = true) {
  MlpGrads g;
  if (param_grads) {
    g = mlp_zero_grads(p);
  } else {
    g.d_weights.resize(p.layer_count());
    g.d_biases.resize(p.layer_count());
  }
  MatX delta = d_output;  // dL/d(post[l]) walking backwards
  for (int l = p.layer_count() - 1; l >= 0; --l) {
    bool last = (l == p.layer_count() - 1);
    MatX dz;
    if (last) {
      dz = delta;
    } else {
      dz = delta.cwiseProduct(cache.pre[l].unaryExpr(
          [&](double v) { return act::derivative(p.activation, v); }));
    }
    const MatX& layer_in = (l == 0) ? cache.input : cache.post[l - 1];
    if (param_grads) {
      g.d_weights[l] = dz.transpose() * layer_in;
      g.d_biases[l] = dz.colwise().sum().transpose();
    }
    delta = dz * p.weights[l];
  }
  g.d_input = delta;
  return g;
}

// Single-sample convenience: forward value plus gradients of any scalar
// combination of the outputs (seeded reverse pass).
struct MlpEval {
  VecX output;
  const MlpParams* params = nullptr;
  MlpCache cache;

  MlpGrads grad(const VecX& seed, bool param_grads = true) const {
    MatX d_out = seed.transpose();
    return mlp_backward(*params, cache, d_out, param_grads);
  }
};

inline MlpEval mlp_eval_grad(const MlpParams& p, const VecX& input) {
  MlpEval ev;
  ev.params = &p;
  MatX y = mlp_forward(p, input.transpose(), &ev.cache);
  ev.output = y.row(0).transpose();
  return ev;
}

// Adam with bias correction, one moment pair per tensor.
struct AdamState {
  std::vector<MatX> m_w, v_w;
  std::vector<VecX> m_b, v_b;
  long steps = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline AdamState adam_init(const MlpParams& p) {
  AdamState s;
  for (int l = 0; l < p.layer_count(); ++l) {
    s.m_w.emplace_back(MatX::Zero(p.weights[l].rows(), p.weights[l].cols()));
    s.v_w.emplace_back(MatX::Zero(p.weights[l].rows(), p.weights[l].cols()));
    s.m_b.emplace_back(VecX::Zero(p.biases[l].size()));
    s.v_b.emplace_back(VecX::Zero(p.biases[l].size()));
  }
  return s;
}

inline void adam_step(MlpParams& p, AdamState& s, const MlpGrads& g, double lr) {
  s.steps += 1;
  double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.steps));
  double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.steps));
  for (int l = 0; l < p.layer_count(); ++l) {
    s.m_w[l] = s.beta1 * s.m_w[l] + (1 - s.beta1) * g.d_weights[l];
    s.v_w[l] = s.beta2 * s.v_w[l] +
               (1 - s.beta2) * g.d_weights[l].cwiseProduct(g.d_weights[l]);
    p.weights[l].array() -= lr * (s.m_w[l].array() / bc1) /
                            ((s.v_w[l].array() / bc2).sqrt() + s.eps);
    s.m_b[l] = s.beta1 * s.m_b[l] + (1 - s.beta1) * g.d_biases[l];
    s.v_b[l] = s.beta2 * s.v_b[l] +
               (1 - s.beta2) * g.d_biases[l].cwiseProduct(g.d_biases[l]);
    p.biases[l].array() -= lr * (s.m_b[l].array() / bc1) /
                           ((s.v_b[l].array() / bc2).sqrt() + s.eps);
  }
}

}  // namespace ctsim
