#pragma once

// Ring replay buffer for off-policy learning. Uniform sampling with
// replacement from an explicitly passed generator keeps runs reproducible.

#include "ctsim/rng.hpp"
#include "ctsim/types.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ctsim {

struct Transition {
  VecX s;          // observation
  VecX a_unit;     // post-squash, pre-scaling action in (-1, 1)
  VecX a;          // environment-scaled action (what Q consumes)
  double r = 0.0;
  VecX s_next;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay capacity must be > 0");
  }

  size_t size() const { return data_.size(); }
  size_t capacity() const { return capacity_; }
  const Transition& at(size_t i) const { return data_[i]; }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::vector<size_t> sample_indices(size_t batch_size, Rng& rng) const {
    if (data_.size() < batch_size)
      throw std::runtime_error("replay buffer underfull for requested batch");
    std::vector<size_t> idx(batch_size);
    std::uniform_int_distribution<size_t> dist(0, data_.size() - 1);
    for (size_t i = 0; i < batch_size; ++i) idx[i] = dist(rng);
    return idx;
  }

 private:
  size_t capacity_;
  size_t head_ = 0;  // oldest slot once full
  std::vector<Transition> data_;
};

// Batch view assembled as matrices (rows are samples).
struct Batch {
  MatX s;
  MatX a_unit;
  MatX a;
  VecX r;
  MatX s_next;
  VecX done;  // 1.0 when terminal
};

inline void replay_push(ReplayBuffer& buffer, Transition t) {
  buffer.push(std::move(t));
}

inline Batch replay_sample(const ReplayBuffer& buffer, size_t batch_size,
                           Rng& rng) {
  std::vector<size_t> idx = buffer.sample_indices(batch_size, rng);
  const Transition& first = buffer.at(idx[0]);
  Batch b;
  b.s.resize(batch_size, first.s.size());
  b.a_unit.resize(batch_size, first.a_unit.size());
  b.a.resize(batch_size, first.a.size());
  b.r.resize(batch_size);
  b.s_next.resize(batch_size, first.s_next.size());
  b.done.resize(batch_size);
  for (size_t i = 0; i < batch_size; ++i) {
    const Transition& t = buffer.at(idx[i]);
    b.s.row(i) = t.s.transpose();
    b.a_unit.row(i) = t.a_unit.transpose();
    b.a.row(i) = t.a.transpose();
    b.r[i] = t.r;
    b.s_next.row(i) = t.s_next.transpose();
    b.done[i] = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace ctsim
