#include "mvw/labels.hpp"

#include <algorithm>
#include <unordered_map>

namespace mvw {

bool is_dense(std::span<const int> labels) {
  if (labels.empty()) return false;
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  if (*std::min_element(labels.begin(), labels.end()) < 0) return false;
  std::vector<char> seen(static_cast<std::size_t>(k), 0);
  for (int l : labels) seen[static_cast<std::size_t>(l)] = 1;
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

int label_count(std::span<const int> labels) {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

std::vector<int> canonicalize(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

std::vector<int> block_sizes(std::span<const int> labels) {
  std::vector<int> sizes(static_cast<std::size_t>(label_count(labels)), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return sizes;
}

std::vector<std::vector<int>> label_members(std::span<const int> labels) {
  std::vector<std::vector<int>> members(static_cast<std::size_t>(label_count(labels)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  return members;
}

}  // namespace mvw
