#include "atompart/partition.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>
#include <unordered_map>

namespace atompart {

BlockSizes::BlockSizes(std::vector<int> s) : sizes(std::move(s)) {
  for (int v : sizes)
    if (v < 1) throw InvalidArgument("BlockSizes: sizes must be positive");
}

int BlockSizes::n() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

BlockSizes BlockSizes::with_incremented(int block) const {
  if (block < 0 || block >= k()) throw InvalidArgument("BlockSizes: block out of range");
  BlockSizes r(*this);
  ++r.sizes[block];
  return r;
}

BlockSizes BlockSizes::with_appended_singleton() const {
  BlockSizes r(*this);
  r.sizes.push_back(1);
  return r;
}

BlockSizes BlockSizes::without(int block) const {
  if (block < 0 || block >= k()) throw InvalidArgument("BlockSizes: block out of range");
  BlockSizes r(*this);
  r.sizes.erase(r.sizes.begin() + block);
  return r;
}

Partition Partition::from_blocks(int n, std::vector<std::vector<int>> blocks) {
  if (n < 1) throw InvalidArgument("Partition: n must be >= 1");
  std::vector<char> seen(static_cast<size_t>(n) + 1, 0);
  int count = 0;
  for (auto& b : blocks) {
    if (b.empty()) throw InvalidArgument("Partition: empty block");
    std::sort(b.begin(), b.end());
    for (int v : b) {
      if (v < 1 || v > n) throw InvalidArgument("Partition: element out of range");
      if (seen[static_cast<size_t>(v)]) throw InvalidArgument("Partition: repeated element");
      seen[static_cast<size_t>(v)] = 1;
      ++count;
    }
  }
  if (count != n) throw InvalidArgument("Partition: blocks do not cover {1,...,n}");
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return Partition(n, std::move(blocks));
}

Partition Partition::from_assignments(std::span<const int> assign) {
  if (assign.empty()) throw InvalidArgument("Partition: empty assignment vector");
  std::unordered_map<int, int> relabel;
  std::vector<std::vector<int>> blocks;
  for (size_t i = 0; i < assign.size(); ++i) {
    auto [it, inserted] = relabel.try_emplace(assign[i], static_cast<int>(blocks.size()));
    if (inserted) blocks.emplace_back();
    blocks[static_cast<size_t>(it->second)].push_back(static_cast<int>(i) + 1);
  }
  return Partition(static_cast<int>(assign.size()), std::move(blocks));
}

BlockSizes Partition::block_sizes() const {
  std::vector<int> s;
  s.reserve(blocks_.size());
  for (const auto& b : blocks_) s.push_back(static_cast<int>(b.size()));
  return BlockSizes(std::move(s));
}

std::vector<int> Partition::assignments() const {
  std::vector<int> a(static_cast<size_t>(n_), -1);
  for (size_t j = 0; j < blocks_.size(); ++j)
    for (int v : blocks_[j]) a[static_cast<size_t>(v) - 1] = static_cast<int>(j);
  return a;
}

Partition Partition::restrict_to(int m) const {
  if (m < 1 || m > n_) throw InvalidArgument("Partition::restrict_to: m out of range");
  std::vector<std::vector<int>> blocks;
  for (const auto& b : blocks_) {
    std::vector<int> kept;
    for (int v : b)
      if (v <= m) kept.push_back(v);
    if (!kept.empty()) blocks.push_back(std::move(kept));
  }
  return from_blocks(m, std::move(blocks));
}

bool operator<(const Partition& a, const Partition& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  return a.blocks_ < b.blocks_;
}

Partition induced_partition(std::span<const Label> labels) {
  if (labels.empty()) throw InvalidArgument("induced_partition: empty label sequence");
  std::unordered_map<std::int64_t, int> block_of;
  std::vector<int> assign(labels.size());
  int next = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = block_of.try_emplace(labels[i].key(), next);
    if (inserted) ++next;
    assign[i] = it->second;
  }
  return Partition::from_assignments(assign);
}

int partition_enumeration_cap() {
  static const int cap = [] {
    if (const char* env = std::getenv("ATOMPART_CAP_N")) {
      int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return 12;
  }();
  return cap;
}

namespace {

// Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
void enumerate_rgs(int n, std::vector<int>& a, std::vector<int>& maxv, int pos,
                   const std::function<void(const Partition&)>& fn) {
  if (pos == n) {
    fn(Partition::from_assignments(a));
    return;
  }
  int hi = pos == 0 ? 0 : maxv[static_cast<size_t>(pos) - 1] + 1;
  for (int v = 0; v <= hi; ++v) {
    a[static_cast<size_t>(pos)] = v;
    maxv[static_cast<size_t>(pos)] = std::max(v, pos == 0 ? 0 : maxv[static_cast<size_t>(pos) - 1]);
    enumerate_rgs(n, a, maxv, pos + 1, fn);
  }
}

}  // namespace

void for_each_partition(int n, const std::function<void(const Partition&)>& fn, int cap) {
  if (n < 1) throw InvalidArgument("for_each_partition: n must be >= 1");
  if (n > cap)
    throw ResourceLimit("for_each_partition: n = " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
  std::vector<int> a(static_cast<size_t>(n)), maxv(static_cast<size_t>(n));
  enumerate_rgs(n, a, maxv, 0, fn);
}

void for_each_partition(int n, const std::function<void(const Partition&)>& fn) {
  for_each_partition(n, fn, partition_enumeration_cap());
}

std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  for_each_partition(n, [&](const Partition& p) { out.push_back(p); });
  return out;
}

}  // namespace atompart
