#pragma once

// Binary checkpoint for SAC training state: all four networks, optimizer
// moments, config, counters, and the RNG state. Doubles are written raw so a
// save/load round trip is bit-exact. The replay buffer is not persisted;
// checkpoints serve evaluation and the one-update-equality contract, not
// mid-run replay recovery.

#include "ctsim/sac.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace ctsim {
namespace ckpt {

inline constexpr char kMagic[8] = {'C', 'T', 'S', 'I', 'M', 'C', 'K', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

inline void write_mat(std::ostream& os, const MatX& m) {
  write_pod<int32_t>(os, static_cast<int32_t>(m.rows()));
  write_pod<int32_t>(os, static_cast<int32_t>(m.cols()));
  os.write(reinterpret_cast<const char*>(m.data()),
           static_cast<std::streamsize>(sizeof(double) * m.size()));
}

inline MatX read_mat(std::istream& is) {
  int32_t rows = read_pod<int32_t>(is);
  int32_t cols = read_pod<int32_t>(is);
  if (rows < 0 || cols < 0 || rows > (1 << 20) || cols > (1 << 20))
    throw std::runtime_error("checkpoint corrupt: bad matrix shape");
  MatX m(rows, cols);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return m;
}

inline void write_vec(std::ostream& os, const VecX& v) {
  write_pod<int32_t>(os, static_cast<int32_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(sizeof(double) * v.size()));
}

inline VecX read_vec(std::istream& is) {
  int32_t n = read_pod<int32_t>(is);
  if (n < 0 || n > (1 << 24))
    throw std::runtime_error("checkpoint corrupt: bad vector size");
  VecX v(n);
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!is) throw std::runtime_error("checkpoint truncated");
  return v;
}

inline void write_mlp(std::ostream& os, const MlpParams& p) {
  write_pod<int32_t>(os, static_cast<int32_t>(p.weights.size()));
  write_pod<int32_t>(os, static_cast<int32_t>(p.activation));
  for (size_t l = 0; l < p.weights.size(); ++l) {
    write_mat(os, p.weights[l]);
    write_vec(os, p.biases[l]);
  }
}

inline MlpParams read_mlp(std::istream& is) {
  MlpParams p;
  int32_t layers = read_pod<int32_t>(is);
  p.activation = static_cast<Activation>(read_pod<int32_t>(is));
  for (int32_t l = 0; l < layers; ++l) {
    p.weights.push_back(read_mat(is));
    p.biases.push_back(read_vec(is));
  }
  return p;
}

inline void write_adam(std::ostream& os, const AdamState& s) {
  write_pod<int32_t>(os, static_cast<int32_t>(s.m_w.size()));
  for (size_t l = 0; l < s.m_w.size(); ++l) {
    write_mat(os, s.m_w[l]);
    write_mat(os, s.v_w[l]);
    write_vec(os, s.m_b[l]);
    write_vec(os, s.v_b[l]);
  }
  write_pod<int64_t>(os, s.steps);
  write_pod<double>(os, s.beta1);
  write_pod<double>(os, s.beta2);
  write_pod<double>(os, s.eps);
}

inline AdamState read_adam(std::istream& is) {
  AdamState s;
  int32_t layers = read_pod<int32_t>(is);
  for (int32_t l = 0; l < layers; ++l) {
    s.m_w.push_back(read_mat(is));
    s.v_w.push_back(read_mat(is));
    s.m_b.push_back(read_vec(is));
    s.v_b.push_back(read_vec(is));
  }
  s.steps = read_pod<int64_t>(is);
  s.beta1 = read_pod<double>(is);
  s.beta2 = read_pod<double>(is);
  s.eps = read_pod<double>(is);
  return s;
}

}  // namespace ckpt

inline void sac_save(const SacState& st, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  os.write(ckpt::kMagic, sizeof(ckpt::kMagic));
  ckpt::write_pod<int32_t>(os, 1);  // format version

  ckpt::write_pod<int32_t>(os, st.obs_dim);
  ckpt::write_pod<int32_t>(os, st.act_dim);
  ckpt::write_vec(os, st.action_bound);

  const SacConfig& c = st.config;
  ckpt::write_pod<double>(os, c.lr);
  ckpt::write_pod<double>(os, c.gamma);
  ckpt::write_pod<double>(os, c.alpha);
  ckpt::write_pod<uint64_t>(os, c.replay_capacity);
  ckpt::write_pod<int32_t>(os, c.batch_size);
  ckpt::write_pod<int32_t>(os, static_cast<int32_t>(c.hidden.size()));
  for (int h : c.hidden) ckpt::write_pod<int32_t>(os, h);
  ckpt::write_pod<double>(os, c.polyak_tau);
  ckpt::write_pod<uint64_t>(os, c.seed);
  ckpt::write_pod<uint8_t>(os, c.twin_q ? 1 : 0);
  ckpt::write_pod<int32_t>(os, static_cast<int32_t>(c.activation));
  ckpt::write_pod<int32_t>(os, c.update_every);
  ckpt::write_pod<int32_t>(os, c.warmup_steps);
  ckpt::write_pod<double>(os, c.log_std_min);
  ckpt::write_pod<double>(os, c.log_std_max);

  ckpt::write_mlp(os, st.value);
  ckpt::write_mlp(os, st.q1);
  ckpt::write_mlp(os, st.q2);
  ckpt::write_mlp(os, st.policy);
  ckpt::write_mlp(os, st.target_value);
  ckpt::write_adam(os, st.value_opt);
  ckpt::write_adam(os, st.q1_opt);
  ckpt::write_adam(os, st.q2_opt);
  ckpt::write_adam(os, st.policy_opt);

  ckpt::write_pod<int64_t>(os, st.env_steps);
  ckpt::write_pod<int64_t>(os, st.updates);

  std::string rs = rng_state_string(st.rng);
  ckpt::write_pod<uint64_t>(os, rs.size());
  os.write(rs.data(), static_cast<std::streamsize>(rs.size()));
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

inline SacState sac_load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, ckpt::kMagic, sizeof(magic)) != 0)
    throw std::runtime_error("not a checkpoint file: " + path);
  int32_t version = ckpt::read_pod<int32_t>(is);
  if (version != 1)
    throw std::runtime_error("unsupported checkpoint version");

  SacState st;
  st.obs_dim = ckpt::read_pod<int32_t>(is);
  st.act_dim = ckpt::read_pod<int32_t>(is);
  st.action_bound = ckpt::read_vec(is);

  SacConfig& c = st.config;
  c.lr = ckpt::read_pod<double>(is);
  c.gamma = ckpt::read_pod<double>(is);
  c.alpha = ckpt::read_pod<double>(is);
  c.replay_capacity = ckpt::read_pod<uint64_t>(is);
  c.batch_size = ckpt::read_pod<int32_t>(is);
  int32_t hidden_count = ckpt::read_pod<int32_t>(is);
  c.hidden.clear();
  for (int32_t i = 0; i < hidden_count; ++i)
    c.hidden.push_back(ckpt::read_pod<int32_t>(is));
  c.polyak_tau = ckpt::read_pod<double>(is);
  c.seed = ckpt::read_pod<uint64_t>(is);
  c.twin_q = ckpt::read_pod<uint8_t>(is) != 0;
  c.activation = static_cast<Activation>(ckpt::read_pod<int32_t>(is));
  c.update_every = ckpt::read_pod<int32_t>(is);
  c.warmup_steps = ckpt::read_pod<int32_t>(is);
  c.log_std_min = ckpt::read_pod<double>(is);
  c.log_std_max = ckpt::read_pod<double>(is);

  st.value = ckpt::read_mlp(is);
  st.q1 = ckpt::read_mlp(is);
  st.q2 = ckpt::read_mlp(is);
  st.policy = ckpt::read_mlp(is);
  st.target_value = ckpt::read_mlp(is);
  st.value_opt = ckpt::read_adam(is);
  st.q1_opt = ckpt::read_adam(is);
  st.q2_opt = ckpt::read_adam(is);
  st.policy_opt = ckpt::read_adam(is);

  st.env_steps = ckpt::read_pod<int64_t>(is);
  st.updates = ckpt::read_pod<int64_t>(is);

  uint64_t rs_size = ckpt::read_pod<uint64_t>(is);
  if (rs_size > (1u << 20))
    throw std::runtime_error("checkpoint corrupt: rng state size");
  std::string rs(rs_size, '\0');
  is.read(rs.data(), static_cast<std::streamsize>(rs_size));
  if (!is) throw std::runtime_error("checkpoint truncated");
  rng_set_state(st.rng, rs);
  return st;
}

}  // namespace ctsim
