#pragma once

#include <span>
#include <vector>

namespace mvw {

// Partition labels are 0-based in memory. A labeling is dense when every
// value in 0..max occurs at least once.

bool is_dense(std::span<const int> labels);

/// Number of distinct labels of a dense labeling (max + 1).
int label_count(std::span<const int> labels);

/// Renumber labels by order of first occurrence; empty labels disappear.
std::vector<int> canonicalize(std::span<const int> labels);

/// Block sizes indexed by label; assumes non-negative labels.
std::vector<int> block_sizes(std::span<const int> labels);

/// Members of each block, in ascending index order.
std::vector<std::vector<int>> label_members(std::span<const int> labels);

}  // namespace mvw
