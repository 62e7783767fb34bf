#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace minoria {

// In-memory tabular dataset. Feature rows are the points being mined;
// label/prediction/loss/group are optional side columns. `group` is used
// for evaluation only and never feeds a mining decision. `offset` records
// the accumulated per-column translation applied by normalize_positive so
// results can be reported in the original frame.
struct Dataset {
  Eigen::MatrixXd features;  // n x d
  std::optional<std::vector<int>> label;
  std::optional<std::vector<int>> prediction;
  std::optional<std::vector<double>> loss;
  std::optional<std::vector<int>> group;
  Eigen::VectorXd offset;

  std::size_t n() const { return static_cast<std::size_t>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  Eigen::VectorXd row(std::size_t i) const {
    return features.row(static_cast<Eigen::Index>(i)).transpose();
  }
};

// Which CSV columns to ingest. Feature column names are mandatory and
// ordered; the rest are picked up only when named here.
struct ColumnMap {
  std::vector<std::string> features;
  std::optional<std::string> label;
  std::optional<std::string> prediction;
  std::optional<std::string> loss;
  std::optional<std::string> group;
};

// Two isotropic Gaussian blobs: a majority and a (typically smaller,
// shifted) minority. Rows 0..n_major-1 are group 0, the rest group 1.
struct SynthSpec {
  int d = 2;
  std::size_t n_major = 0;
  std::size_t n_minor = 0;
  Eigen::VectorXd mean_major;
  Eigen::VectorXd mean_minor;
  double sd_major = 1.0;
  double sd_minor = 1.0;
  std::uint64_t seed = 0;
};

// Strict CSV dialect: comma separator, mandatory header row, '.' decimal
// point, UTF-8, no quoting. Parse failures throw std::runtime_error and
// name the offending data row (1-based, header excluded) and column.
Dataset load_csv(const std::string& path, const ColumnMap& columns);

// Writes features plus whichever side columns are present, same dialect.
void write_csv(const Dataset& ds, const std::string& path);

// Translates each column with min < delta so every value is >= delta > 0.
// The applied shift accumulates into `offset`.
Dataset normalize_positive(const Dataset& ds, double delta = 1.0);

// 2-d only: (x, y) -> (y, A - x), a rigid motion that maps directions with
// a negative component into the positive quadrant so a second sweep pass
// can cover them. Requires A > max x so the output stays positive.
Dataset rotate_negative(const Dataset& ds, double A);

// Default A for rotate_negative: ceil(max feature value) + 1.
double default_rotation_offset(const Dataset& ds);

Dataset generate_synthetic(const SynthSpec& spec);

}  // namespace minoria
