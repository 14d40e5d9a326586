#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace eegrid {

enum class FoldMode { SubjectIndependent, SubjectDependent };

// The unit a fold plan never splits: a subject in independent mode, a
// (subject, video) pair in dependent mode (trial_id empty for subjects).
struct UnitKey {
  std::string subject;
  std::string trial;

  auto operator<=>(const UnitKey&) const = default;
};

struct LabeledUnit {
  UnitKey key;
  int label{0};
};

struct FoldPlan {
  int k{0};
  FoldMode mode{FoldMode::SubjectIndependent};
  std::map<UnitKey, int> assignment;  // unit -> fold id in [0, k)

  int fold_of(const UnitKey& key) const;  // throws when the unit is unknown
  std::vector<std::size_t> fold_sizes() const;
};

// Stratified assignment: units are grouped by class label, each group is
// shuffled with the seeded RNG and dealt across folds through one rotating
// pointer, so per-class counts and total fold sizes each differ by at most
// one unit. Deterministic given (units, k, seed).
FoldPlan make_folds(const std::vector<LabeledUnit>& units, int k, FoldMode mode,
                    std::uint64_t seed);

}  // namespace eegrid
