#pragma once

#include <functional>
#include <span>
#include <vector>

#include "atompart/errors.hpp"
#include "atompart/label.hpp"

namespace atompart {

// Unordered block sizes of a partition, kept in block appearance order.
struct BlockSizes {
  std::vector<int> sizes;

  BlockSizes() = default;
  explicit BlockSizes(std::vector<int> s);

  int n() const;
  int k() const { return static_cast<int>(sizes.size()); }

  // Copies used by predictive and marginal computations.
  BlockSizes with_incremented(int block) const;
  BlockSizes with_appended_singleton() const;
  BlockSizes without(int block) const;
};

// Set partition of {1,...,n} in canonical form: blocks sorted internally,
// ordered by least element (appearance order for exchangeable sequences).
class Partition {
 public:
  static Partition from_blocks(int n, std::vector<std::vector<int>> blocks);
  // `assign[i]` is the block of element i+1; ids are canonicalized to
  // appearance order, so any labelling with equal fibers gives the same
  // partition.
  static Partition from_assignments(std::span<const int> assign);

  int n() const { return n_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  const std::vector<std::vector<int>>& blocks() const { return blocks_; }
  BlockSizes block_sizes() const;
  std::vector<int> assignments() const;  // 0-based appearance-order ids

  // Restriction to {1,...,m}, 1 <= m <= n.
  Partition restrict_to(int m) const;

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.n_ == b.n_ && a.blocks_ == b.blocks_;
  }
  friend bool operator<(const Partition& a, const Partition& b);

 private:
  Partition(int n, std::vector<std::vector<int>> blocks) : n_(n), blocks_(std::move(blocks)) {}
  int n_ = 0;
  std::vector<std::vector<int>> blocks_;
};

// Partition of {1,...,n} induced by label equality: i ~ j iff labels equal.
Partition induced_partition(std::span<const Label> labels);

// Enumeration of all partitions of {1,...,n} in restricted-growth-string
// order. Guarded by a cap since Bell(n) grows superexponentially; the env
// var ATOMPART_CAP_N overrides the default cap of 12 (test use only).
int partition_enumeration_cap();
void for_each_partition(int n, const std::function<void(const Partition&)>& fn);
void for_each_partition(int n, const std::function<void(const Partition&)>& fn, int cap);
std::vector<Partition> all_partitions(int n);

}  // namespace atompart
