#pragma once

#include <numeric>
#include <vector>

namespace rh {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // The smaller root survives.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Dense ids 0..k-1 for the members (member[i] true), numbered in order of each
// set's first member; -1 for non-members.
inline std::vector<int> canonical_labels(UnionFind& uf, const std::vector<unsigned char>& member,
                                         int& count) {
  std::vector<int> root_id(member.size(), -1);
  std::vector<int> out(member.size(), -1);
  count = 0;
  for (std::size_t i = 0; i < member.size(); ++i) {
    if (!member[i]) continue;
    const std::size_t r = uf.find(i);
    if (root_id[r] < 0) root_id[r] = count++;
    out[i] = root_id[r];
  }
  return out;
}

}  // namespace rh
