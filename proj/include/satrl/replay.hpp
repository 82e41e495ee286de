#pragma once

// Ring-buffer experience replay with uniform without-replacement batches.

#include <array>
#include <cstddef>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "satrl/rng.hpp"

namespace satrl {

struct BufferEntry {
    std::array<double, 7> obs{};      // net-encoded observation (see net_obs)
    std::array<double, 3> action{};   // normalized to [-1, 1]
    double reward = 0.0;
    std::array<double, 7> next_obs{};
    bool terminated = false;  // true stops the bootstrap; truncation does not
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }

    void push(const BufferEntry& e) {
        if (data_.size() < capacity_) {
            data_.push_back(e);
        } else {
            data_[write_] = e;  // FIFO eviction
        }
        write_ = (write_ + 1) % capacity_;
    }

    size_t size() const { return data_.size(); }
    size_t capacity() const { return capacity_; }
    const BufferEntry& operator[](size_t i) const { return data_[i]; }

    // Floyd's sampling: batch distinct indices, deterministic given the rng.
    std::vector<size_t> sample_indices(size_t batch, Rng& rng) const {
        if (batch > data_.size()) throw std::invalid_argument("ReplayBuffer: batch larger than contents");
        std::vector<size_t> out;
        out.reserve(batch);
        std::unordered_set<size_t> taken;
        for (size_t i = data_.size() - batch; i < data_.size(); ++i) {
            const size_t j = static_cast<size_t>(rng.uniform_below(i + 1));
            if (taken.insert(j).second) {
                out.push_back(j);
            } else {
                taken.insert(i);
                out.push_back(i);
            }
        }
        return out;
    }

private:
    size_t capacity_;
    size_t write_ = 0;
    std::vector<BufferEntry> data_;
};

}  // namespace satrl
