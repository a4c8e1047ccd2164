#include "opf/heap.hpp"

#include <cmath>
#include <string>

#include "opf/errors.hpp"

namespace opf {

CostHeap::CostHeap(std::size_t capacity) : position_(capacity, 0), color_(capacity, HeapColor::NeverInserted) {
  entries_.reserve(capacity);
}

void CostHeap::throw_bad_id(NodeId id) const {
  throw StructuralMisuseError("heap: node id " + std::to_string(id) + " outside [0, " +
                              std::to_string(color_.size()) + ")");
}

double CostHeap::key(NodeId id) const {
  check_id(id);
  if (color_[id] != HeapColor::InHeap) {
    throw StructuralMisuseError("heap: node " + std::to_string(id) + " is not queued");
  }
  return entries_[position_[id]].key;
}

void CostHeap::insert(NodeId id, double key) {
  check_id(id);
  if (color_[id] != HeapColor::NeverInserted) {
    throw StructuralMisuseError("heap: node " + std::to_string(id) +
                                (color_[id] == HeapColor::InHeap ? " already queued" : " already removed"));
  }
  if (std::isnan(key)) throw RejectedUpdateError("heap: NaN key for node " + std::to_string(id));
  color_[id] = HeapColor::InHeap;
  entries_.push_back({id, key, counter_++});
  position_[id] = entries_.size() - 1;
  sift_up(entries_.size() - 1);
}

void CostHeap::decrease_key(NodeId id, double new_key) {
  check_id(id);
  if (color_[id] != HeapColor::InHeap) {
    throw StructuralMisuseError("heap: decrease_key on node " + std::to_string(id) + " which is not queued");
  }
  const std::size_t slot = position_[id];
  if (!(new_key < entries_[slot].key)) {
    throw RejectedUpdateError("heap: new key for node " + std::to_string(id) + " does not decrease it");
  }
  entries_[slot].key = new_key;
  sift_up(slot);
}

std::pair<NodeId, double> CostHeap::pop_min() {
  if (entries_.empty()) throw EmptyPopError("heap: pop from empty heap");
  const Entry top = entries_.front();
  const Entry last = entries_.back();
  entries_.pop_back();
  if (!entries_.empty()) {
    place(0, last);
    sift_down(0);
  }
  color_[top.id] = HeapColor::Removed;
  return {top.id, top.key};
}

void CostHeap::place(std::size_t slot, const Entry& e) {
  entries_[slot] = e;
  position_[e.id] = slot;
}

void CostHeap::sift_up(std::size_t slot) {
  const Entry moving = entries_[slot];
  while (slot > 0) {
    const std::size_t parent = (slot - 1) / 2;
    if (!precedes(moving, entries_[parent])) break;
    place(slot, entries_[parent]);
    slot = parent;
  }
  place(slot, moving);
}

void CostHeap::sift_down(std::size_t slot) {
  const Entry moving = entries_[slot];
  const std::size_t n = entries_.size();
  for (;;) {
    std::size_t child = 2 * slot + 1;
    if (child >= n) break;
    if (child + 1 < n && precedes(entries_[child + 1], entries_[child])) ++child;
    if (!precedes(entries_[child], moving)) break;
    place(slot, entries_[child]);
    slot = child;
  }
  place(slot, moving);
}

bool CostHeap::check_invariants() const {
  std::size_t queued = 0;
  for (std::size_t id = 0; id < color_.size(); ++id) {
    if (color_[id] != HeapColor::InHeap) continue;
    ++queued;
    const std::size_t slot = position_[id];
    if (slot >= entries_.size() || entries_[slot].id != static_cast<NodeId>(id)) return false;
  }
  if (queued != entries_.size()) return false;
  for (std::size_t slot = 1; slot < entries_.size(); ++slot) {
    if (precedes(entries_[slot], entries_[(slot - 1) / 2])) return false;
  }
  return true;
}

}  // namespace opf
