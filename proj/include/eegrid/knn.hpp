#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

namespace eegrid {

// Majority label of the k Euclidean-nearest training vectors. Distance ties
// break toward the lower sample index.
inline int knn_classify(const std::vector<std::vector<double>>& train_x,
                        const std::vector<int>& train_y, std::span<const double> query, int k) {
  if (train_x.empty()) throw std::runtime_error("knn: empty training set");
  if (train_x.size() != train_y.size()) throw std::runtime_error("knn: label count mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > train_x.size())
    throw std::runtime_error("knn: k out of range");

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(train_x.size());
  for (std::size_t i = 0; i < train_x.size(); ++i) {
    const auto& x = train_x[i];
    if (x.size() != query.size()) throw std::runtime_error("knn: dimension mismatch");
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x[j] - query[j];
      d2 += diff * diff;
    }
    dist.emplace_back(d2, i);
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  int votes = 0;
  for (int i = 0; i < k; ++i) votes += train_y[dist[static_cast<std::size_t>(i)].second];
  return votes * 2 > k ? 1 : 0;
}

}  // namespace eegrid
