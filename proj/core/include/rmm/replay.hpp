#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rmm/neural.hpp"
#include "rmm/rng.hpp"

namespace rmm {

struct ReplayBatch {
    Matrix obs;       // obs_dim x batch
    Matrix action;    // action_dim x batch
    Vector reward;    // batch
    Matrix next_obs;  // obs_dim x batch
    Vector done;      // batch, 1.0 for terminal transitions
    std::vector<std::size_t> indices;
};

/// Fixed-capacity FIFO ring of transitions stored in flat arrays.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, int obs_dim, int action_dim);

    void add(std::span<const double> obs, std::span<const double> action, double reward,
             std::span<const double> next_obs, bool terminal);

    std::size_t size() const noexcept { return size_; }
    std::size_t capacity() const noexcept { return capacity_; }
    int obs_dim() const noexcept { return obs_dim_; }
    int action_dim() const noexcept { return action_dim_; }

    /// Uniform sample of distinct stored transitions. Throws
    /// std::invalid_argument if batch exceeds the number stored.
    ReplayBatch sample(std::size_t batch, Rng& rng) const;

    std::span<const double> obs(std::size_t slot) const;
    std::span<const double> action(std::size_t slot) const;
    std::span<const double> next_obs(std::size_t slot) const;
    double reward(std::size_t slot) const { return reward_.at(slot); }
    bool terminal(std::size_t slot) const { return done_.at(slot) != 0.0; }

private:
    std::size_t capacity_;
    int obs_dim_;
    int action_dim_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;
    std::vector<double> obs_, action_, next_obs_, reward_, done_;
};

}  // namespace rmm
