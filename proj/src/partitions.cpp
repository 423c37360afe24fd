#include "shapehom/partitions.hpp"

#include <functional>

#include "shapehom/jet.hpp"

namespace shapehom {

std::vector<PartitionShape> partition_shapes(int n) {
  std::vector<PartitionShape> out;
  if (n == 0) {
    out.push_back({{}, 1.0});
    return out;
  }
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int remaining, int max_part) {
    if (remaining == 0) {
      PartitionShape s;
      s.parts = cur;
      double denom = 1.0;
      int mult = 1;
      for (size_t i = 0; i < cur.size(); ++i) {
        denom *= Jet2::factorial(cur[i]);
        if (i + 1 < cur.size() && cur[i + 1] == cur[i]) {
          ++mult;
        } else {
          denom *= Jet2::factorial(mult);
          mult = 1;
        }
      }
      s.count = Jet2::factorial(n) / denom;
      out.push_back(std::move(s));
      return;
    }
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
      cur.push_back(p);
      rec(remaining - p, p);
      cur.pop_back();
    }
  };
  rec(n, n);
  return out;
}

int count_set_partitions(int n) {
  if (n == 0) return 1;
  // Restricted growth strings: a[0]=0, a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> a(n, 0);
  std::function<int(int, int)> rec = [&](int i, int mx) -> int {
    if (i == n) return 1;
    int total = 0;
    for (int v = 0; v <= mx + 1; ++v) {
      a[i] = v;
      total += rec(i + 1, std::max(mx, v));
    }
    return total;
  };
  return rec(1, 0);
}

}  // namespace shapehom
