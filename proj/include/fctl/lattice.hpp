#pragma once

// Emptiness patterns of the queue during the green phase.
//
// For a queue holding l vehicles at the start of green, sets(j, l) lists
// every arrival prefix (n_1..n_j) that keeps the queue positive through
// slots 1..j-1 and empties it exactly at the end of slot j.

#include <span>
#include <vector>

namespace fctl {

/// 1 iff min_m (x0 + n_1 + ... + n_m - m) <= 0 over m = 0..k.
int indicator_T(int x0, std::span<const int> increments);

class GTable {
 public:
  explicit GTable(int green);

  int green() const { return green_; }
  /// Vectors for effective green j starting from l, 0 <= l <= j <= g-1.
  const std::vector<std::vector<int>>& sets(int j, int l) const;
  std::size_t total_vectors() const;

 private:
  int green_;
  std::vector<std::vector<std::vector<std::vector<int>>>> sets_;  // [j][l]
};

/// Depth-recursive enumeration in lexicographic order.
GTable enumerate_G(int green);

}  // namespace fctl
