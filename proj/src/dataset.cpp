#include "blockdp/dataset.hpp"

#include <string>

#include "blockdp/errors.hpp"

namespace blockdp {

void validate_block_layout(const BlockLayout& layout, int m) {
  if (layout.empty()) throw SpecError("block layout: no blocks");
  if (layout.front().lo != 1) throw SpecError("block layout: first block must start at attribute 1");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const AttrRange& b = layout[i];
    if (b.lo > b.hi) throw SpecError("block layout: empty block");
    if (i > 0 && b.lo != layout[i - 1].hi + 1) {
      throw SpecError("block layout: blocks must be contiguous and in order");
    }
  }
  if (layout.back().hi != m) {
    throw SpecError("block layout: blocks must cover attributes 1.." + std::to_string(m));
  }
}

BlockLayout uniform_blocks(int m, int block_size) {
  if (m < 1 || block_size < 1) throw SpecError("uniform_blocks: m and block_size must be positive");
  BlockLayout layout;
  for (int lo = 1; lo + block_size - 1 <= m; lo += block_size) {
    layout.push_back({lo, lo + block_size - 1});
  }
  if (layout.empty()) {
    layout.push_back({1, m});
  } else if (layout.back().hi != m) {
    layout.back().hi = m;
  }
  return layout;
}

std::optional<int> block_of(const BlockLayout& layout, const AttrRange& window) {
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (layout[i].contains(window)) return static_cast<int>(i) + 1;
  }
  return std::nullopt;
}

namespace {

void check_unit_interval(const Dataset::Matrix& attributes) {
  if (attributes.rows() == 0 || attributes.cols() == 0) {
    throw SpecError("dataset: needs at least one row and one attribute");
  }
  if (!attributes.allFinite() || (attributes.array() < 0.0).any() ||
      (attributes.array() > 1.0).any()) {
    throw SpecError("dataset: attribute values must lie in [0, 1]");
  }
}

}  // namespace

Dataset::Dataset(Matrix attributes) : attributes_(std::move(attributes)) {
  check_unit_interval(attributes_);
}

Dataset::Dataset(Matrix attributes, Eigen::VectorXd labels)
    : attributes_(std::move(attributes)), labels_(std::move(labels)) {
  check_unit_interval(attributes_);
  if (labels_->size() != attributes_.rows()) {
    throw SpecError("dataset: label count must match row count");
  }
  for (Eigen::Index i = 0; i < labels_->size(); ++i) {
    const double y = (*labels_)[i];
    if (y != 0.0 && y != 1.0) throw SpecError("dataset: labels must be 0 or 1");
  }
}

Dataset Dataset::from_individuals(const std::vector<Individual>& rows) {
  if (rows.empty()) throw SpecError("dataset: no individuals");
  const Eigen::Index m = rows.front().attributes.size();
  const bool labeled = rows.front().label.has_value();
  Matrix attributes(static_cast<Eigen::Index>(rows.size()), m);
  Eigen::VectorXd labels(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].attributes.size() != m) {
      throw SpecError("dataset: individuals must share the attribute count");
    }
    if (rows[i].label.has_value() != labeled) {
      throw SpecError("dataset: either every individual is labeled or none is");
    }
    attributes.row(static_cast<Eigen::Index>(i)) = rows[i].attributes.transpose();
    if (labeled) labels[static_cast<Eigen::Index>(i)] = *rows[i].label;
  }
  if (labeled) return Dataset(std::move(attributes), std::move(labels));
  return Dataset(std::move(attributes));
}

const Eigen::VectorXd& Dataset::labels() const {
  if (!labels_) throw SpecError("dataset: no labels present");
  return *labels_;
}

Eigen::VectorXd Dataset::column(int attr) const {
  if (attr < 1 || attr > m()) throw SpecError("dataset: attribute index out of range");
  return attributes_.col(attr - 1);
}

Dataset Dataset::with_label_as_attribute() const {
  const Eigen::VectorXd& y = labels();
  Matrix wide(attributes_.rows(), attributes_.cols() + 1);
  wide.leftCols(attributes_.cols()) = attributes_;
  wide.col(attributes_.cols()) = y;
  return Dataset(std::move(wide));
}

std::optional<Dataset> Dataset::rows_with_label(double y) const {
  const Eigen::VectorXd& lab = labels();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < lab.size(); ++i) {
    if (lab[i] == y) keep.push_back(i);
  }
  if (keep.empty()) return std::nullopt;
  Matrix sub(static_cast<Eigen::Index>(keep.size()), attributes_.cols());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    sub.row(static_cast<Eigen::Index>(i)) = attributes_.row(keep[i]);
  }
  return Dataset(std::move(sub));
}

}  // namespace blockdp
