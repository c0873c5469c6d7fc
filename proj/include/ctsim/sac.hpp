#pragma once

// Soft Actor-Critic, original three-network form: state value V, soft Q, and
// a tanh-squashed Gaussian policy, plus a polyak-averaged target V. All
// gradients are computed by hand through the batched MLP machinery; losses
// take pre-drawn noise so they are pure functions (finite-difference
// checkable). A twin-Q variant sits behind a config flag, off by default.

#include "ctsim/mlp.hpp"
#include "ctsim/replay.hpp"
#include "ctsim/rng.hpp"
#include "ctsim/types.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsim {

struct SacConfig {
  double lr = 3e-4;
  double gamma = 0.99;
  double alpha = 0.3;            // entropy temperature
  size_t replay_capacity = 1000000;
  int batch_size = 256;
  std::vector<int> hidden = {256, 256};
  double polyak_tau = 0.005;
  unsigned long seed = 0;
  bool twin_q = false;
  Activation activation = Activation::softplus;
  int update_every = 1;          // gradient updates every N environment steps
  int warmup_steps = 1000;       // uniform random actions before learning
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

namespace detail {

inline double softplus_stable(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

constexpr double kLogTwoPi = 1.8378770664093453;  // ln(2*pi)
constexpr double kLogTwo = 0.6931471805599453;    // ln 2

}  // namespace detail

// One batched pass through the policy with reparameterized sampling:
// u = mean + std * eps, a = bound * tanh(u). Keeps everything the gradient
// chain needs.
struct PolicyBatch {
  MlpCache cache;
  MatX mean, log_std, stddev, eps, u, t, a;  // B x act_dim
  MatX clamp_mask;  // 0 where the log-std clamp is active (gradient blocked)
  VecX log_prob;    // B
};

inline PolicyBatch policy_forward_sample(const MlpParams& policy, const MatX& s,
                                         const VecX& bound, const MatX& eps,
                                         double log_std_min,
                                         double log_std_max) {
  const int batch = static_cast<int>(s.rows());
  const int act_dim = static_cast<int>(bound.size());
  PolicyBatch pb;
  MatX head = mlp_forward(policy, s, &pb.cache);  // B x 2*act_dim
  pb.mean = head.leftCols(act_dim);
  MatX log_std_raw = head.rightCols(act_dim);
  pb.clamp_mask = MatX::Ones(batch, act_dim);
  pb.log_std = log_std_raw;
  for (int r = 0; r < batch; ++r)
    for (int c = 0; c < act_dim; ++c) {
      if (log_std_raw(r, c) < log_std_min) {
        pb.log_std(r, c) = log_std_min;
        pb.clamp_mask(r, c) = 0.0;
      } else if (log_std_raw(r, c) > log_std_max) {
        pb.log_std(r, c) = log_std_max;
        pb.clamp_mask(r, c) = 0.0;
      }
    }
  pb.stddev = pb.log_std.array().exp();
  pb.eps = eps;
  pb.u = pb.mean + pb.stddev.cwiseProduct(eps);
  pb.t = pb.u.array().tanh();
  pb.a = pb.t * bound.asDiagonal();

  // log pi(a|s) = sum_i [ -0.5 ln(2 pi) - log_std_i - 0.5 eps_i^2 ]
  //              - sum_i log(1 - tanh^2(u_i)) - sum_i log(bound_i),
  // with log(1 - tanh^2 u) = 2 (ln 2 - u - softplus(-2u)) for stability.
  pb.log_prob = VecX::Zero(batch);
  double log_bound_sum = bound.array().log().sum();
  for (int r = 0; r < batch; ++r) {
    double lp = -log_bound_sum;
    for (int c = 0; c < act_dim; ++c) {
      lp += -0.5 * detail::kLogTwoPi - pb.log_std(r, c) -
            0.5 * eps(r, c) * eps(r, c);
      lp -= 2.0 * (detail::kLogTwo - pb.u(r, c) -
                   detail::softplus_stable(-2.0 * pb.u(r, c)));
    }
    pb.log_prob[r] = lp;
  }
  return pb;
}

// Single-observation sampling for rollouts. noise == nullptr selects the
// deterministic action bound * tanh(mean).
struct PolicySample {
  VecX a_unit;      // tanh(u)
  VecX a;           // scaled by bound
  double log_prob;  // evaluated at the drawn (or zero) noise
};

inline PolicySample policy_sample(const MlpParams& policy, const VecX& s,
                                  const VecX& bound,
                                  const VecX* noise = nullptr,
                                  double log_std_min = -20.0,
                                  double log_std_max = 2.0) {
  MatX eps(1, bound.size());
  if (noise) {
    eps.row(0) = noise->transpose();
  } else {
    eps.setZero();
  }
  PolicyBatch pb = policy_forward_sample(policy, s.transpose(), bound, eps,
                                         log_std_min, log_std_max);
  PolicySample out;
  out.a_unit = pb.t.row(0).transpose();
  out.a = pb.a.row(0).transpose();
  out.log_prob = pb.log_prob[0];
  return out;
}

struct LossGrads {
  double loss = 0.0;
  MlpGrads grads;
};

namespace detail {

// d(log pi)/d(mean) and d(log pi)/d(log_std_raw), and the action Jacobians
// needed by the reparameterized losses. All per-sample, per-dimension.
struct PolicyChain {
  MatX dlogp_dmean;     // 2 tanh(u)
  MatX dlogp_dlogstd;   // -1 + 2 tanh(u) std eps   (masked by clamp)
  MatX da_dmean;        // bound (1 - tanh^2 u)
  MatX da_dlogstd;      // bound (1 - tanh^2 u) std eps   (masked)
};

inline PolicyChain policy_chain(const PolicyBatch& pb, const VecX& bound) {
  PolicyChain ch;
  MatX one_minus_t2 = (1.0 - pb.t.array().square()).matrix();
  ch.dlogp_dmean = 2.0 * pb.t;
  MatX std_eps = pb.stddev.cwiseProduct(pb.eps);
  ch.dlogp_dlogstd =
      ((2.0 * pb.t.array() * std_eps.array() - 1.0).matrix())
          .cwiseProduct(pb.clamp_mask);
  ch.da_dmean = (one_minus_t2 * bound.asDiagonal());
  ch.da_dlogstd =
      (one_minus_t2.cwiseProduct(std_eps) * bound.asDiagonal())
          .cwiseProduct(pb.clamp_mask);
  return ch;
}

// Q evaluation on (s, a) pairs, optionally taking the element-wise minimum of
// a twin pair. Returns per-sample values and, when requested, the gradient of
// the selected Q w.r.t. the action input.
struct QEval {
  VecX q;       // B
  MatX dq_da;   // B x act_dim (zero-size unless requested)
};

inline QEval q_eval(const MlpParams& q1, const MlpParams* q2, const MatX& s,
                    const MatX& a, bool want_action_grad) {
  const int batch = static_cast<int>(s.rows());
  MatX input(batch, s.cols() + a.cols());
  input << s, a;

  MlpCache c1;
  VecX v1 = mlp_forward(q1, input, &c1).col(0);
  QEval out;
  if (!q2) {
    out.q = v1;
    if (want_action_grad) {
      MlpGrads g = mlp_backward(q1, c1, MatX::Ones(batch, 1), false);
      out.dq_da = g.d_input.rightCols(a.cols());
    }
    return out;
  }
  MlpCache c2;
  VecX v2 = mlp_forward(*q2, input, &c2).col(0);
  out.q = v1.cwiseMin(v2);
  if (want_action_grad) {
    MlpGrads g1 = mlp_backward(q1, c1, MatX::Ones(batch, 1), false);
    MlpGrads g2 = mlp_backward(*q2, c2, MatX::Ones(batch, 1), false);
    out.dq_da.resize(batch, a.cols());
    for (int r = 0; r < batch; ++r)
      out.dq_da.row(r) = (v1[r] <= v2[r]) ? g1.d_input.row(r).tail(a.cols())
                                          : g2.d_input.row(r).tail(a.cols());
  }
  return out;
}

}  // namespace detail

// J_V = mean over batch of 1/2 (V(s) - [Q(s, a~) - alpha log pi(a~|s)])^2,
// a~ freshly sampled with the provided noise; bracket treated as constant.
inline LossGrads value_loss(const MlpParams& value, const MlpParams& q,
                            const MlpParams& policy, const Batch& batch,
                            double alpha, const VecX& bound, const MatX& noise,
                            double log_std_min = -20.0,
                            double log_std_max = 2.0,
                            const MlpParams* q_twin = nullptr) {
  const int b = static_cast<int>(batch.s.rows());
  PolicyBatch pb = policy_forward_sample(policy, batch.s, bound, noise,
                                         log_std_min, log_std_max);
  detail::QEval qe = detail::q_eval(q, q_twin, batch.s, pb.a, false);
  VecX target = qe.q - alpha * pb.log_prob;

  MlpCache vc;
  VecX v = mlp_forward(value, batch.s, &vc).col(0);
  VecX resid = v - target;

  LossGrads out;
  out.loss = 0.5 * resid.squaredNorm() / b;
  MatX d_out = resid / b;
  out.grads = mlp_backward(value, vc, d_out);
  return out;
}

// J_Q = mean of 1/2 (Q(s,a) - [r + gamma (1-done) V_target(s')])^2.
inline LossGrads q_loss(const MlpParams& q, const MlpParams& target_value,
                        const Batch& batch, double gamma) {
  const int b = static_cast<int>(batch.s.rows());
  VecX v_next = mlp_forward(target_value, batch.s_next, nullptr).col(0);
  VecX y = batch.r.array() +
           gamma * (1.0 - batch.done.array()) * v_next.array();

  MatX input(b, batch.s.cols() + batch.a.cols());
  input << batch.s, batch.a;
  MlpCache qc;
  VecX qv = mlp_forward(q, input, &qc).col(0);
  VecX resid = qv - y;

  LossGrads out;
  out.loss = 0.5 * resid.squaredNorm() / b;
  MatX d_out = resid / b;
  out.grads = mlp_backward(q, qc, d_out);
  return out;
}

// J_pi = mean of (alpha log pi(a~|s) - Q(s, a~)), reparameterized: gradients
// flow through a~ into the policy head.
inline LossGrads policy_loss(const MlpParams& policy, const MlpParams& q,
                             const Batch& batch, double alpha,
                             const VecX& bound, const MatX& noise,
                             double log_std_min = -20.0,
                             double log_std_max = 2.0,
                             const MlpParams* q_twin = nullptr) {
  const int b = static_cast<int>(batch.s.rows());
  const int act_dim = static_cast<int>(bound.size());
  PolicyBatch pb = policy_forward_sample(policy, batch.s, bound, noise,
                                         log_std_min, log_std_max);
  detail::QEval qe = detail::q_eval(q, q_twin, batch.s, pb.a, true);
  detail::PolicyChain ch = detail::policy_chain(pb, bound);

  LossGrads out;
  out.loss = (alpha * pb.log_prob - qe.q).mean();

  MatX d_mean = (alpha * ch.dlogp_dmean - qe.dq_da.cwiseProduct(ch.da_dmean)) / b;
  MatX d_logstd =
      (alpha * ch.dlogp_dlogstd - qe.dq_da.cwiseProduct(ch.da_dlogstd)) / b;
  MatX d_head(b, 2 * act_dim);
  d_head << d_mean, d_logstd;
  out.grads = mlp_backward(policy, pb.cache, d_head);
  return out;
}

inline void polyak_update(MlpParams& target, const MlpParams& source,
                          double tau) {
  for (int l = 0; l < target.layer_count(); ++l) {
    target.weights[l] = (1.0 - tau) * target.weights[l] + tau * source.weights[l];
    target.biases[l] = (1.0 - tau) * target.biases[l] + tau * source.biases[l];
  }
}

struct SacState {
  SacConfig config;
  int obs_dim = 0;
  int act_dim = 0;
  VecX action_bound;
  MlpParams value, q1, q2, policy, target_value;
  AdamState value_opt, q1_opt, q2_opt, policy_opt;
  Rng rng;
  long env_steps = 0;
  long updates = 0;
};

inline SacState sac_init(int obs_dim, int act_dim, const VecX& action_bound,
                         const SacConfig& config) {
  SacState st;
  st.config = config;
  st.obs_dim = obs_dim;
  st.act_dim = act_dim;
  st.action_bound = action_bound;
  st.rng.seed(config.seed);
  st.value = mlp_init(obs_dim, config.hidden, 1, st.rng, config.activation);
  st.q1 = mlp_init(obs_dim + act_dim, config.hidden, 1, st.rng, config.activation);
  st.q2 = mlp_init(obs_dim + act_dim, config.hidden, 1, st.rng, config.activation);
  st.policy =
      mlp_init(obs_dim, config.hidden, 2 * act_dim, st.rng, config.activation);
  st.target_value = st.value;
  st.value_opt = adam_init(st.value);
  st.q1_opt = adam_init(st.q1);
  st.q2_opt = adam_init(st.q2);
  st.policy_opt = adam_init(st.policy);
  return st;
}

struct SacLosses {
  double value = 0.0;
  double q = 0.0;
  double policy = 0.0;
  bool finite = true;
};

// One gradient step on each of J_V, J_Q, J_pi (in that order), then the
// polyak step on the target network. Noise for the fresh policy samples is
// drawn here, so the caller just supplies the batch.
inline SacLosses sac_update(SacState& st, const Batch& batch) {
  const SacConfig& cfg = st.config;
  const int b = static_cast<int>(batch.s.rows());
  const MlpParams* twin = cfg.twin_q ? &st.q2 : nullptr;

  MatX noise_v = gaussian_mat(st.rng, b, st.act_dim);
  LossGrads vl = value_loss(st.value, st.q1, st.policy, batch, cfg.alpha,
                            st.action_bound, noise_v, cfg.log_std_min,
                            cfg.log_std_max, twin);
  adam_step(st.value, st.value_opt, vl.grads, cfg.lr);

  LossGrads ql = q_loss(st.q1, st.target_value, batch, cfg.gamma);
  adam_step(st.q1, st.q1_opt, ql.grads, cfg.lr);
  double q_loss_value = ql.loss;
  if (cfg.twin_q) {
    LossGrads ql2 = q_loss(st.q2, st.target_value, batch, cfg.gamma);
    adam_step(st.q2, st.q2_opt, ql2.grads, cfg.lr);
    q_loss_value = 0.5 * (q_loss_value + ql2.loss);
  }

  MatX noise_p = gaussian_mat(st.rng, b, st.act_dim);
  LossGrads pl = policy_loss(st.policy, st.q1, batch, cfg.alpha,
                             st.action_bound, noise_p, cfg.log_std_min,
                             cfg.log_std_max, twin);
  adam_step(st.policy, st.policy_opt, pl.grads, cfg.lr);

  polyak_update(st.target_value, st.value, cfg.polyak_tau);
  st.updates += 1;

  SacLosses out{vl.loss, q_loss_value, pl.loss, true};
  out.finite = std::isfinite(out.value) && std::isfinite(out.q) &&
               std::isfinite(out.policy);
  return out;
}

}  // namespace ctsim
