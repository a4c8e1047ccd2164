#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "opf/types.hpp"

namespace opf {

enum class HeapColor : std::uint8_t { NeverInserted, InHeap, Removed };

// Binary min-heap over dense node ids [0, capacity) keyed by path cost.
//
// Equal keys pop in insertion order: every entry carries the value of a
// monotone counter taken at insert time, and decrease_key keeps it. Each id
// walks NeverInserted -> InHeap -> Removed exactly once.
class CostHeap {
 public:
  explicit CostHeap(std::size_t capacity);

  void insert(NodeId id, double key);
  void decrease_key(NodeId id, double new_key);
  std::pair<NodeId, double> pop_min();

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return color_.size(); }

  HeapColor color(NodeId id) const {
    check_id(id);
    return color_[static_cast<std::size_t>(id)];
  }
  // Current key of an InHeap id.
  double key(NodeId id) const;

  // Full O(n) audit: heap order with FIFO tie-break, and position map
  // consistency. Meant for tests.
  bool check_invariants() const;

 private:
  struct Entry {
    NodeId id;
    double key;
    std::uint64_t order;
  };

  static bool precedes(const Entry& a, const Entry& b) noexcept {
    return a.key < b.key || (a.key == b.key && a.order < b.order);
  }

  void check_id(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= color_.size()) throw_bad_id(id);
  }
  [[noreturn]] void throw_bad_id(NodeId id) const;
  void place(std::size_t slot, const Entry& e);
  void sift_up(std::size_t slot);
  void sift_down(std::size_t slot);

  std::vector<Entry> entries_;
  std::vector<std::size_t> position_;
  std::vector<HeapColor> color_;
  std::uint64_t counter_ = 0;
};

}  // namespace opf
