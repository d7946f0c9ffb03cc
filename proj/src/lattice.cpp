#include "fctl/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace fctl {

int indicator_T(int x0, std::span<const int> increments) {
  long level = x0;
  if (level <= 0) return 1;
  for (int n : increments) {
    level += n - 1;
    if (level <= 0) return 1;
  }
  return 0;
}

namespace {

// Fills slot `m` (0-based) of `prefix`. `partial` is n_1 + ... + n_m. Slots
// before the last must keep l + partial - (m+1) > 0; the last closes the
// path at exactly zero, so its value is forced.
void extend(int l, int j, int m, int partial, std::vector<int>& prefix,
            std::vector<std::vector<int>>& out) {
  if (m == j - 1) {
    const int last = j - l - partial;
    if (last < 0) return;
    prefix[m] = last;
    out.push_back(prefix);
    return;
  }
  const int lo = std::max(0, m + 2 - l - partial);
  const int hi = j - l - partial;
  for (int n = lo; n <= hi; ++n) {
    prefix[m] = n;
    extend(l, j, m + 1, partial + n, prefix, out);
  }
}

}  // namespace

GTable::GTable(int green) : green_(green) {
  if (green < 1) throw std::invalid_argument("enumerate_G: green must be >= 1");
  sets_.assign(green, std::vector<std::vector<std::vector<int>>>(green));
  sets_[0][0].push_back({});
  for (int l = 1; l < green; ++l)
    for (int j = l; j < green; ++j) {
      std::vector<int> prefix(j);
      extend(l, j, 0, 0, prefix, sets_[j][l]);
    }
}

const std::vector<std::vector<int>>& GTable::sets(int j, int l) const {
  if (j < 0 || l < 0 || j >= green_ || l >= green_)
    throw std::out_of_range("GTable::sets index out of range");
  return sets_[j][l];
}

std::size_t GTable::total_vectors() const {
  std::size_t n = 0;
  for (const auto& row : sets_)
    for (const auto& cell : row) n += cell.size();
  return n;
}

GTable enumerate_G(int green) { return GTable(green); }

}  // namespace fctl
