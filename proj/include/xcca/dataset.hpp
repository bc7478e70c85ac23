#pragma once

#include "xcca/matrix.hpp"
#include "xcca/normalize.hpp"

#include <vector>

namespace xcca {

/// Time-aligned pair of views. Row t of `features` and row t of `brain` are
/// one paired sample. `segment_boundaries` lists the first row of every
/// independently recorded run (subject/movie); shifts never cross them.
///
/// `labels` is optional (empty when absent). When present it has one ±1
/// entry per row and travels with the features row, since annotations
/// describe the stimulus.
struct PairedDataset {
  Matrix features;
  Matrix brain;
  std::vector<Index> segment_boundaries{0};
  NormStats feature_stats;
  NormStats brain_stats;
  std::vector<int> labels;

  Index rows() const { return features.rows(); }
  Index segment_count() const { return static_cast<Index>(segment_boundaries.size()); }
  Index segment_begin(Index s) const { return segment_boundaries[static_cast<std::size_t>(s)]; }
  Index segment_end(Index s) const;
  bool has_labels() const { return !labels.empty(); }

  /// Throws ValidationError if the row counts or boundaries are inconsistent.
  void validate() const;
};

/// Builds a single-segment dataset with identity stats.
PairedDataset make_dataset(Matrix features, Matrix brain, std::vector<int> labels = {});

/// Frame-rate conversion settings.
struct AlignmentConfig {
  int ts = 0;
  double fps = 5.0;
  double tr_seconds = 3.0;

  /// round(fps * tr_seconds); throws if the configuration is invalid.
  Index grouping_factor() const;
};

/// Row g of the output is the mean of input rows [g*group, (g+1)*group).
/// A trailing partial group is dropped.
Matrix group_average(const Matrix& m, Index group);

/// Pairs features row (i + ts) with brain row i inside every segment, dropping
/// rows whose partner falls outside the segment. ts = -2 pairs brain at t with
/// features from two samples earlier.
PairedDataset apply_time_shift(const PairedDataset& ds, int ts);

/// Stacks datasets in time. Boundaries of every constituent are kept (offset).
/// Normalization stats are taken from the first dataset.
PairedDataset concat_time(const std::vector<PairedDataset>& datasets);

/// The rows of segment `s` as a standalone single-segment dataset.
PairedDataset segment(const PairedDataset& ds, Index s);

/// Concatenation of the listed segments, in the given order.
PairedDataset select_segments(const PairedDataset& ds, const std::vector<Index>& segments);

/// z-scores both views with the given stats and records them on the result.
PairedDataset normalize(const PairedDataset& ds, const NormStats& feature_stats, const NormStats& brain_stats);

}  // namespace xcca
