#pragma once

#include <vector>

namespace shapehom {

// Integer partition of n (parts descending) together with the number of
// set partitions of an n-element set having exactly these block sizes:
//   count = n! / (prod_k (k!)^{m_k} m_k!),  m_k = multiplicity of part k.
// Grouping the Faa di Bruno sum over set partitions by block-size shape
// is exact because equal-size blocks carry identical derivative fields.
struct PartitionShape {
  std::vector<int> parts;
  double count = 1.0;
};

// All shapes for n >= 1 in a fixed deterministic order. For n = 0 a single
// empty shape with count 1 is returned (empty product convention).
std::vector<PartitionShape> partition_shapes(int n);

// Brute-force set-partition enumeration via restricted growth strings;
// used by tests to validate the counts (sums to the Bell numbers).
int count_set_partitions(int n);

}  // namespace shapehom
