#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace blockdp {

// Inclusive range of 1-based attribute indices. Attribute indices are
// 1-based everywhere in the public API; conversion to 0-based storage
// happens only at the Eigen boundary.
struct AttrRange {
  int lo = 1;
  int hi = 1;

  int size() const { return hi - lo + 1; }
  // Width counts the span between the extremes, so a single attribute has
  // width 0.
  int width() const { return hi - lo; }
  bool contains(int attr) const { return lo <= attr && attr <= hi; }
  bool contains(const AttrRange& other) const { return lo <= other.lo && other.hi <= hi; }

  bool operator==(const AttrRange&) const = default;
};

// Ordered partition of attributes 1..m into contiguous blocks.
using BlockLayout = std::vector<AttrRange>;

// Throws SpecError unless blocks are nonempty, contiguous, in order, and
// exactly cover 1..m.
void validate_block_layout(const BlockLayout& layout, int m);

// Convenience: m attributes split into blocks of size `block_size` (the last
// block absorbs the remainder).
BlockLayout uniform_blocks(int m, int block_size);

// 1-based index of the unique block containing `window`, or nullopt if the
// window straddles a block boundary.
std::optional<int> block_of(const BlockLayout& layout, const AttrRange& window);

struct Individual {
  Eigen::VectorXd attributes;      // values in [0, 1]
  std::optional<double> label;     // 0 or 1 when present
};

// Immutable sample of n individuals over m attributes, optionally labeled.
// Attribute values live in [0, 1]; rows are individuals.
class Dataset {
 public:
  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit Dataset(Matrix attributes);
  Dataset(Matrix attributes, Eigen::VectorXd labels);

  static Dataset from_individuals(const std::vector<Individual>& rows);

  int n() const { return static_cast<int>(attributes_.rows()); }
  int m() const { return static_cast<int>(attributes_.cols()); }
  bool has_labels() const { return labels_.has_value(); }

  const Matrix& attributes() const { return attributes_; }
  const Eigen::VectorXd& labels() const;

  // Attribute column, 1-based.
  Eigen::VectorXd column(int attr) const;

  // Copy with the label appended as attribute m+1 and no separate label.
  Dataset with_label_as_attribute() const;

  // Label-free subset of rows whose label equals y (0 or 1), or nullopt
  // when no row matches.
  std::optional<Dataset> rows_with_label(double y) const;

 private:
  Matrix attributes_;
  std::optional<Eigen::VectorXd> labels_;
};

}  // namespace blockdp
