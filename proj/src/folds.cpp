#include "eegrid/folds.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "eegrid/util.hpp"

namespace eegrid {

int FoldPlan::fold_of(const UnitKey& key) const {
  const auto it = assignment.find(key);
  if (it == assignment.end())
    throw std::runtime_error("unit (" + key.subject + ", " + key.trial + ") not in fold plan");
  return it->second;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (const auto& [key, fold] : assignment) sizes[static_cast<std::size_t>(fold)]++;
  return sizes;
}

FoldPlan make_folds(const std::vector<LabeledUnit>& units, int k, FoldMode mode,
                    std::uint64_t seed) {
  if (k < 2) throw std::runtime_error("fold count must be >= 2");
  if (static_cast<std::size_t>(k) > units.size())
    throw std::runtime_error("fold count exceeds unit count");

  std::set<UnitKey> seen;
  std::set<int> classes;
  for (const auto& u : units) {
    if (u.label != 0 && u.label != 1) throw std::runtime_error("unit labels must be 0 or 1");
    if (!seen.insert(u.key).second)
      throw std::runtime_error("duplicate unit (" + u.key.subject + ", " + u.key.trial + ")");
    classes.insert(u.label);
  }
  if (classes.size() < 2) throw std::runtime_error("both classes must be present");

  // Sort before shuffling so the plan depends only on the unit set and seed,
  // not on caller ordering.
  std::vector<LabeledUnit> by_class[2];
  {
    std::vector<LabeledUnit> sorted = units;
    std::sort(sorted.begin(), sorted.end(),
              [](const LabeledUnit& a, const LabeledUnit& b) { return a.key < b.key; });
    for (auto& u : sorted) by_class[u.label].push_back(u);
  }

  Rng rng(seed);
  FoldPlan plan;
  plan.k = k;
  plan.mode = mode;
  int next_fold = 0;
  for (auto& group : by_class) {
    rng.shuffle(group);
    for (const auto& u : group) {
      plan.assignment[u.key] = next_fold;
      next_fold = (next_fold + 1) % k;
    }
  }
  return plan;
}

}  // namespace eegrid
