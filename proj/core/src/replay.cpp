#include "rmm/replay.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmm {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    if (obs_dim <= 0 || action_dim <= 0) throw std::invalid_argument("replay dimensions must be positive");
}

void ReplayBuffer::add(std::span<const double> obs, std::span<const double> action, double reward,
                       std::span<const double> next_obs, bool terminal) {
    if (obs.size() != static_cast<std::size_t>(obs_dim_) || next_obs.size() != static_cast<std::size_t>(obs_dim_) ||
        action.size() != static_cast<std::size_t>(action_dim_))
        throw std::invalid_argument("transition does not match the replay dimensions");

    const auto od = static_cast<std::size_t>(obs_dim_);
    const auto ad = static_cast<std::size_t>(action_dim_);
    if (size_ < capacity_) {
        obs_.insert(obs_.end(), obs.begin(), obs.end());
        action_.insert(action_.end(), action.begin(), action.end());
        next_obs_.insert(next_obs_.end(), next_obs.begin(), next_obs.end());
        reward_.push_back(reward);
        done_.push_back(terminal ? 1.0 : 0.0);
        ++size_;
    } else {
        std::copy(obs.begin(), obs.end(), obs_.begin() + static_cast<std::ptrdiff_t>(head_ * od));
        std::copy(action.begin(), action.end(), action_.begin() + static_cast<std::ptrdiff_t>(head_ * ad));
        std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + static_cast<std::ptrdiff_t>(head_ * od));
        reward_[head_] = reward;
        done_[head_] = terminal ? 1.0 : 0.0;
    }
    head_ = (head_ + 1) % capacity_;
}

ReplayBatch ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (batch == 0 || batch > size_) throw std::invalid_argument("replay sample larger than the stored transitions");

    // Floyd's algorithm: distinct indices, O(batch^2) membership tests.
    std::vector<std::size_t> picked;
    picked.reserve(batch);
    for (std::size_t j = size_ - batch; j < size_; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end())
            picked.push_back(t);
        else
            picked.push_back(j);
    }
    // Floyd gives a uniform set but not a uniform order (the first pick never
    // exceeds size - batch); shuffle so every batch position is uniform too.
    std::shuffle(picked.begin(), picked.end(), rng);

    ReplayBatch out;
    const auto n = static_cast<Eigen::Index>(batch);
    out.obs.resize(obs_dim_, n);
    out.next_obs.resize(obs_dim_, n);
    out.action.resize(action_dim_, n);
    out.reward.resize(n);
    out.done.resize(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const std::size_t slot = picked[static_cast<std::size_t>(c)];
        for (int r = 0; r < obs_dim_; ++r) {
            out.obs(r, c) = obs_[slot * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(r)];
            out.next_obs(r, c) = next_obs_[slot * static_cast<std::size_t>(obs_dim_) + static_cast<std::size_t>(r)];
        }
        for (int r = 0; r < action_dim_; ++r)
            out.action(r, c) = action_[slot * static_cast<std::size_t>(action_dim_) + static_cast<std::size_t>(r)];
        out.reward(c) = reward_[slot];
        out.done(c) = done_[slot];
    }
    out.indices = std::move(picked);
    return out;
}

std::span<const double> ReplayBuffer::obs(std::size_t slot) const {
    if (slot >= size_) throw std::out_of_range("replay slot");
    return {obs_.data() + slot * static_cast<std::size_t>(obs_dim_), static_cast<std::size_t>(obs_dim_)};
}

std::span<const double> ReplayBuffer::action(std::size_t slot) const {
    if (slot >= size_) throw std::out_of_range("replay slot");
    return {action_.data() + slot * static_cast<std::size_t>(action_dim_), static_cast<std::size_t>(action_dim_)};
}

std::span<const double> ReplayBuffer::next_obs(std::size_t slot) const {
    if (slot >= size_) throw std::out_of_range("replay slot");
    return {next_obs_.data() + slot * static_cast<std::size_t>(obs_dim_), static_cast<std::size_t>(obs_dim_)};
}

}  // namespace rmm
