#include "xcca/dataset.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace xcca {

Index PairedDataset::segment_end(Index s) const {
  const auto next = static_cast<std::size_t>(s) + 1;
  return next < segment_boundaries.size() ? segment_boundaries[next] : rows();
}

void PairedDataset::validate() const {
  if (features.rows() != brain.rows()) {
    throw ValidationError("dataset: features have " + std::to_string(features.rows()) + " rows, brain has " +
                          std::to_string(brain.rows()));
  }
  if (segment_boundaries.empty() || segment_boundaries.front() != 0) {
    throw ValidationError("dataset: segment boundaries must start at 0");
  }
  for (std::size_t i = 1; i < segment_boundaries.size(); ++i) {
    if (segment_boundaries[i] <= segment_boundaries[i - 1]) {
      throw ValidationError("dataset: segment boundaries must be strictly increasing");
    }
  }
  if (segment_boundaries.back() >= rows()) throw ValidationError("dataset: segment boundary past the last row");
  if (!labels.empty() && static_cast<Index>(labels.size()) != rows()) {
    throw ValidationError("dataset: " + std::to_string(labels.size()) + " labels for " + std::to_string(rows()) +
                          " rows");
  }
}

PairedDataset make_dataset(Matrix features, Matrix brain, std::vector<int> labels) {
  PairedDataset ds;
  ds.feature_stats = NormStats::identity(features.cols());
  ds.brain_stats = NormStats::identity(brain.cols());
  ds.features = std::move(features);
  ds.brain = std::move(brain);
  ds.labels = std::move(labels);
  ds.validate();
  return ds;
}

Index AlignmentConfig::grouping_factor() const {
  if (!(fps > 0.0)) throw ValidationError("alignment: fps must be positive");
  if (!(tr_seconds > 0.0)) throw ValidationError("alignment: tr_seconds must be positive");
  const auto group = static_cast<Index>(std::llround(fps * tr_seconds));
  if (group < 1) throw ValidationError("alignment: round(fps * tr_seconds) must be at least 1");
  return group;
}

Matrix group_average(const Matrix& m, Index group) {
  if (group < 1) throw ValidationError("group_average: group must be >= 1, got " + std::to_string(group));
  const Index out_rows = m.rows() / group;
  Matrix out(out_rows, m.cols());
  for (Index g = 0; g < out_rows; ++g) {
    out.row(g) = m.middleRows(g * group, group).colwise().mean();
  }
  return out;
}

PairedDataset apply_time_shift(const PairedDataset& ds, int ts) {
  ds.validate();
  if (ts == 0) return ds;
  const Index shift = std::abs(ts);
  std::vector<Index> feature_rows;
  std::vector<Index> brain_rows;
  std::vector<Index> boundaries;
  for (Index s = 0; s < ds.segment_count(); ++s) {
    const Index begin = ds.segment_begin(s);
    const Index end = ds.segment_end(s);
    if (shift >= end - begin) {
      throw ValidationError("apply_time_shift: |ts| = " + std::to_string(shift) + " not smaller than segment " +
                            std::to_string(s) + " length " + std::to_string(end - begin));
    }
    boundaries.push_back(static_cast<Index>(brain_rows.size()));
    for (Index i = begin; i < end; ++i) {
      const Index partner = i + ts;
      if (partner < begin || partner >= end) continue;
      brain_rows.push_back(i);
      feature_rows.push_back(partner);
    }
  }
  PairedDataset out;
  out.features = take_rows(ds.features, feature_rows);
  out.brain = take_rows(ds.brain, brain_rows);
  out.segment_boundaries = std::move(boundaries);
  out.feature_stats = ds.feature_stats;
  out.brain_stats = ds.brain_stats;
  if (ds.has_labels()) {
    out.labels.reserve(feature_rows.size());
    for (Index r : feature_rows) out.labels.push_back(ds.labels[static_cast<std::size_t>(r)]);
  }
  return out;
}

PairedDataset concat_time(const std::vector<PairedDataset>& datasets) {
  if (datasets.empty()) throw ValidationError("concat_time: no datasets");
  const auto& first = datasets.front();
  Index total = 0;
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const auto& d = datasets[i];
    d.validate();
    if (d.features.cols() != first.features.cols()) {
      throw ValidationError("concat_time: dataset " + std::to_string(i) + " has " +
                            std::to_string(d.features.cols()) + " feature columns, expected " +
                            std::to_string(first.features.cols()));
    }
    if (d.brain.cols() != first.brain.cols()) {
      throw ValidationError("concat_time: dataset " + std::to_string(i) + " has " + std::to_string(d.brain.cols()) +
                            " brain columns, expected " + std::to_string(first.brain.cols()));
    }
    if (d.has_labels() != first.has_labels()) {
      throw ValidationError("concat_time: dataset " + std::to_string(i) + " label presence differs");
    }
    total += d.rows();
  }
  PairedDataset out;
  out.features.resize(total, first.features.cols());
  out.brain.resize(total, first.brain.cols());
  out.segment_boundaries.clear();
  out.feature_stats = first.feature_stats;
  out.brain_stats = first.brain_stats;
  Index offset = 0;
  for (const auto& d : datasets) {
    out.features.middleRows(offset, d.rows()) = d.features;
    out.brain.middleRows(offset, d.rows()) = d.brain;
    for (Index b : d.segment_boundaries) out.segment_boundaries.push_back(offset + b);
    out.labels.insert(out.labels.end(), d.labels.begin(), d.labels.end());
    offset += d.rows();
  }
  return out;
}

PairedDataset segment(const PairedDataset& ds, Index s) {
  if (s < 0 || s >= ds.segment_count()) throw ValidationError("segment: index out of range");
  const Index begin = ds.segment_begin(s);
  const Index len = ds.segment_end(s) - begin;
  PairedDataset out;
  out.features = ds.features.middleRows(begin, len);
  out.brain = ds.brain.middleRows(begin, len);
  out.feature_stats = ds.feature_stats;
  out.brain_stats = ds.brain_stats;
  if (ds.has_labels()) {
    out.labels.assign(ds.labels.begin() + begin, ds.labels.begin() + begin + len);
  }
  return out;
}

PairedDataset select_segments(const PairedDataset& ds, const std::vector<Index>& segments) {
  std::vector<PairedDataset> parts;
  parts.reserve(segments.size());
  for (Index s : segments) parts.push_back(segment(ds, s));
  return concat_time(parts);
}

PairedDataset normalize(const PairedDataset& ds, const NormStats& feature_stats, const NormStats& brain_stats) {
  PairedDataset out = ds;
  out.features = zscore_apply(ds.features, feature_stats);
  out.brain = zscore_apply(ds.brain, brain_stats);
  out.feature_stats = feature_stats;
  out.brain_stats = brain_stats;
  return out;
}

}  // namespace xcca
