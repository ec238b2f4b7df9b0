#include <bilu/symbolic.hpp>

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

namespace bilu {

PatternMatrix symbolic_phase(const PatternMatrix& p, FillParams params) {
  if (params.k < 0) throw std::invalid_argument("symbolic_phase: k must be >= 0");
  const index_t n = p.size();
  for (index_t i = 0; i < n; ++i) {
    if (!p.contains(i, i))
      throw StructuralError("symbolic_phase: diagonal entry missing in row " +
                            std::to_string(i));
  }
  const int k = params.k;

  // Only levels <= k are ever recorded; an absent entry is level infinity.
  constexpr int kAbsent = -1;
  std::vector<int> level(static_cast<std::size_t>(n), kAbsent);
  std::vector<index_t> touched;
  std::priority_queue<index_t, std::vector<index_t>, std::greater<>> pivots;

  std::vector<std::vector<index_t>> rows(static_cast<std::size_t>(n));
  // strictly-upper part of each finished row together with its levels
  std::vector<std::vector<index_t>> upper_cols(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> upper_levels(static_cast<std::size_t>(n));

  for (index_t i = 0; i < n; ++i) {
    touched.clear();
    for (index_t j : p.row(i)) {
      level[j] = 0;
      touched.push_back(j);
      if (j < i) pivots.push(j);
    }

    // Pivots come out in increasing order. Level(i, piv) is final when piv is
    // popped because only smaller pivots can lower it.
    while (!pivots.empty()) {
      const index_t piv = pivots.top();
      pivots.pop();
      const int lip = level[piv];
      const auto& cols = upper_cols[piv];
      const auto& levs = upper_levels[piv];
      for (std::size_t t = 0; t < cols.size(); ++t) {
        const int candidate = lip + levs[t] + 1;
        if (candidate > k) continue;
        const index_t j = cols[t];
        if (level[j] == kAbsent) {
          level[j] = candidate;
          touched.push_back(j);
          if (j < i) pivots.push(j);
        } else if (candidate < level[j]) {
          level[j] = candidate;
        }
      }
    }

    std::sort(touched.begin(), touched.end());
    rows[i] = touched;
    auto first_upper = std::upper_bound(touched.begin(), touched.end(), i);
    for (auto it = first_upper; it != touched.end(); ++it) {
      upper_cols[i].push_back(*it);
      upper_levels[i].push_back(level[*it]);
    }
    for (index_t j : touched) level[j] = kAbsent;
  }
  return PatternMatrix(std::move(rows));
}

}  // namespace bilu
