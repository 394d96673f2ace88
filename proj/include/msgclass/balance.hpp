#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "msgclass/types.hpp"

namespace msgclass {

struct ResamplePlan {
  int k_neighbors = 5;
  // Class index -> target count; classes not listed are raised to the
  // majority count.
  std::map<int, int> targets;
  std::uint64_t seed = 0;
};

// Where a synthetic row came from: base + u * (neighbor - base).
struct SyntheticOrigin {
  Index base = 0;
  Index neighbor = 0;
  double u = 0.0;
};

struct SmoteResult {
  Matrix features;                      // originals first, synthetics appended
  Labels labels;
  std::vector<bool> synthetic;          // per row
  std::vector<SyntheticOrigin> origins; // per synthetic row, in generation order
};

// Oversamples each class below its target independently. Neighbors are the
// k nearest same-class rows by Euclidean distance. Throws DataError when a
// class that needs synthesis has a single instance.
SmoteResult smote(const Matrix& features, std::span<const int> labels, const ResamplePlan& plan);

// All pairs (a < b) of mutual nearest neighbors with different labels. Nearest
// neighbor ties go to the lowest index.
std::vector<std::pair<Index, Index>> tomek_links(const Matrix& features, std::span<const int> labels);

struct ResampleResult {
  Matrix features;
  Labels labels;
  std::vector<bool> synthetic;
  std::vector<Index> kept;  // surviving row indices into the SMOTE output
  std::size_t removed = 0;
};

// SMOTE, then Tomek cleaning repeated until no link remains. From each link
// the member of the class that is more frequent after SMOTE is removed; both
// go on a tie.
ResampleResult smote_tomek(const Matrix& features, std::span<const int> labels, const ResamplePlan& plan);

// Squared Euclidean distances between rows of a and rows of b.
template <typename DerivedA, typename DerivedB>
MatrixX<typename DerivedA::Scalar> squared_distances(const Eigen::MatrixBase<DerivedA>& a,
                                                     const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const VectorX<Scalar> na = a.rowwise().squaredNorm();
  const VectorX<Scalar> nb = b.rowwise().squaredNorm();
  MatrixX<Scalar> d = (-2 * (a * b.transpose())).eval();
  d.colwise() += na;
  d.rowwise() += nb.transpose();
  return d.cwiseMax(Scalar(0));
}

}  // namespace msgclass
