#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

#include "evomis/graph.hpp"
#include "evomis/random.hpp"

namespace evomis {

/// Bucket priority queue over node ids with small integer keys.
/// Key updates move a node between buckets in O(1); extraction picks a
/// uniformly random node from the lowest (or highest) nonempty bucket,
/// which implements the random tie-break of the greedy constructors.
class BucketQueue {
public:
    BucketQueue(NodeID n, std::uint32_t max_key)
        : buckets_(max_key + 1), key_(n, 0), pos_(n, 0), present_(n, 0) {}

    bool empty() const { return count_ == 0; }
    std::size_t size() const { return count_; }
    bool contains(NodeID v) const { return present_[v] != 0; }
    std::uint32_t key_of(NodeID v) const { return key_[v]; }

    void push(NodeID v, std::uint32_t key) {
        assert(!present_[v] && key < buckets_.size());
        key_[v] = key;
        pos_[v] = buckets_[key].size();
        buckets_[key].push_back(v);
        present_[v] = 1;
        ++count_;
        if (key < lo_) lo_ = key;
        if (key > hi_) hi_ = key;
    }

    void update_key(NodeID v, std::uint32_t key) {
        assert(present_[v]);
        if (key_[v] == key) return;
        detach(v);
        key_[v] = key;
        pos_[v] = buckets_[key].size();
        buckets_[key].push_back(v);
        if (key < lo_) lo_ = key;
        if (key > hi_) hi_ = key;
    }

    void erase(NodeID v) {
        assert(present_[v]);
        detach(v);
        present_[v] = 0;
        --count_;
    }

    NodeID pop_min(Rng& rng) {
        assert(count_ > 0);
        while (buckets_[lo_].empty()) ++lo_;
        return take(lo_, rng);
    }

    NodeID pop_max(Rng& rng) {
        assert(count_ > 0);
        while (buckets_[hi_].empty()) --hi_;
        return take(hi_, rng);
    }

private:
    void detach(NodeID v) {
        auto& bucket = buckets_[key_[v]];
        NodeID moved = bucket.back();
        bucket[pos_[v]] = moved;
        pos_[moved] = pos_[v];
        bucket.pop_back();
    }

    NodeID take(std::uint32_t key, Rng& rng) {
        auto& bucket = buckets_[key];
        std::size_t i = random_index(rng, bucket.size());
        NodeID v = bucket[i];
        NodeID moved = bucket.back();
        bucket[i] = moved;
        pos_[moved] = i;
        bucket.pop_back();
        present_[v] = 0;
        --count_;
        return v;
    }

    std::vector<std::vector<NodeID>> buckets_;
    std::vector<std::uint32_t> key_;
    std::vector<std::size_t> pos_;
    std::vector<std::uint8_t> present_;
    std::size_t count_ = 0;
    std::uint32_t lo_ = 0;
    std::uint32_t hi_ = 0;
};

} // namespace evomis
