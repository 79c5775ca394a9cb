#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace uga {

/// Binary max-heap of ids. Priorities and heap positions live in arrays owned
/// by the caller, so several heaps can partition one id space: an id belongs
/// to at most one heap at a time and pos[id] is its slot there.
class IndexedMaxHeap {
public:
    using Id = std::uint32_t;

    bool empty() const noexcept { return heap_.empty(); }
    std::size_t size() const noexcept { return heap_.size(); }
    Id top() const { return heap_.front(); }
    void clear() noexcept { heap_.clear(); }

    void push(Id id, std::span<const double> prio, std::span<Id> pos)
    {
        pos[id] = static_cast<Id>(heap_.size());
        heap_.push_back(id);
        sift_up(heap_.size() - 1, prio, pos);
    }

    Id pop(std::span<const double> prio, std::span<Id> pos)
    {
        const Id id = heap_.front();
        remove_at(0, prio, pos);
        return id;
    }

    void remove(Id id, std::span<const double> prio, std::span<Id> pos) { remove_at(pos[id], prio, pos); }

    /// Restores heap order after prio[id] changed.
    void update(Id id, std::span<const double> prio, std::span<Id> pos)
    {
        const std::size_t i = pos[id];
        sift_up(i, prio, pos);
        sift_down(pos[id], prio, pos);
    }

private:
    std::vector<Id> heap_;

    static bool above(Id a, Id b, std::span<const double> prio)
    {
        return prio[a] > prio[b] || (prio[a] == prio[b] && a < b);
    }

    void place(std::size_t i, Id id, std::span<Id> pos)
    {
        heap_[i] = id;
        pos[id] = static_cast<Id>(i);
    }

    void sift_up(std::size_t i, std::span<const double> prio, std::span<Id> pos)
    {
        const Id id = heap_[i];
        while (i > 0) {
            const std::size_t parent = (i - 1) / 2;
            if (!above(id, heap_[parent], prio)) break;
            place(i, heap_[parent], pos);
            i = parent;
        }
        place(i, id, pos);
    }

    void sift_down(std::size_t i, std::span<const double> prio, std::span<Id> pos)
    {
        const Id id = heap_[i];
        const std::size_t n = heap_.size();
        for (;;) {
            std::size_t child = 2 * i + 1;
            if (child >= n) break;
            if (child + 1 < n && above(heap_[child + 1], heap_[child], prio)) ++child;
            if (!above(heap_[child], id, prio)) break;
            place(i, heap_[child], pos);
            i = child;
        }
        place(i, id, pos);
    }

    void remove_at(std::size_t i, std::span<const double> prio, std::span<Id> pos)
    {
        const Id last = heap_.back();
        heap_.pop_back();
        if (i == heap_.size()) return;
        place(i, last, pos);
        sift_up(i, prio, pos);
        sift_down(pos[last], prio, pos);
    }
};

}  // namespace uga
