#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace polya {

// Dense vocabulary index. Ids are assigned in first-occurrence order and are
// always < vocabulary size.
using term_id = std::uint32_t;

struct TermCount {
  term_id term;
  std::uint32_t count;
};

struct TermWeight {
  term_id term;
  double weight;
};

// Sparse per-term counts of a token sequence, sorted by term id.
std::vector<TermCount> count_terms(std::span<const term_id> tokens);

}  // namespace polya
