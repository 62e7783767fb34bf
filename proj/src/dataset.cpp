#include "minoria/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "minoria/rng.hpp"

namespace minoria {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& field, std::size_t row,
                    const std::string& col) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "row " << row << ", column '" << col << "': non-numeric value '"
        << field << "'";
    throw std::runtime_error(msg.str());
  }
  return value;
}

int parse_int(const std::string& field, std::size_t row,
              const std::string& col) {
  int value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream msg;
    msg << "row " << row << ", column '" << col << "': expected integer, got '"
        << field << "'";
    throw std::runtime_error(msg.str());
  }
  return value;
}

void format_double(std::ostream& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, ptr - buf);
  (void)ec;
}

}  // namespace

Dataset load_csv(const std::string& path, const ColumnMap& columns) {
  if (columns.features.size() < 2) {
    throw std::invalid_argument("load_csv: at least 2 feature columns required");
  }
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_csv: '" + path + "' is empty (header required)");
  }
  const std::vector<std::string> header = split_fields(line);

  auto column_of = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error("load_csv: missing column '" + name + "' in '" +
                               path + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::size_t> feat_cols;
  feat_cols.reserve(columns.features.size());
  for (const auto& name : columns.features) feat_cols.push_back(column_of(name));
  std::optional<std::size_t> label_col, pred_col, loss_col, group_col;
  if (columns.label) label_col = column_of(*columns.label);
  if (columns.prediction) pred_col = column_of(*columns.prediction);
  if (columns.loss) loss_col = column_of(*columns.loss);
  if (columns.group) group_col = column_of(*columns.group);

  const int d = static_cast<int>(columns.features.size());
  std::vector<double> feat_values;
  std::vector<int> labels, preds, groups;
  std::vector<double> losses;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
    ++row;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      std::ostringstream msg;
      msg << "row " << row << ": expected " << header.size() << " fields, got "
          << fields.size();
      throw std::runtime_error(msg.str());
    }
    for (int j = 0; j < d; ++j) {
      feat_values.push_back(
          parse_double(fields[feat_cols[j]], row, columns.features[j]));
    }
    if (label_col) labels.push_back(parse_int(fields[*label_col], row, *columns.label));
    if (pred_col) preds.push_back(parse_int(fields[*pred_col], row, *columns.prediction));
    if (group_col) groups.push_back(parse_int(fields[*group_col], row, *columns.group));
    if (loss_col) {
      const double v = parse_double(fields[*loss_col], row, *columns.loss);
      if (v < 0.0) {
        std::ostringstream msg;
        msg << "row " << row << ", column '" << *columns.loss
            << "': loss must be >= 0, got " << v;
        throw std::runtime_error(msg.str());
      }
      losses.push_back(v);
    }
  }
  if (row == 0) {
    throw std::runtime_error("load_csv: '" + path + "' has no data rows");
  }

  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(row), d);
  for (std::size_t i = 0; i < row; ++i) {
    for (int j = 0; j < d; ++j) {
      ds.features(static_cast<Eigen::Index>(i), j) = feat_values[i * d + j];
    }
  }
  if (label_col) ds.label = std::move(labels);
  if (pred_col) ds.prediction = std::move(preds);
  if (loss_col) ds.loss = std::move(losses);
  if (group_col) ds.group = std::move(groups);
  ds.offset = Eigen::VectorXd::Zero(d);
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");
  }
  const int d = ds.dim();
  for (int j = 0; j < d; ++j) {
    if (j) out << ',';
    out << 'x' << j;
  }
  if (ds.label) out << ",label";
  if (ds.prediction) out << ",prediction";
  if (ds.loss) out << ",loss";
  if (ds.group) out << ",group";
  out << '\n';
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < d; ++j) {
      if (j) out << ',';
      format_double(out, ds.features(static_cast<Eigen::Index>(i), j));
    }
    if (ds.label) out << ',' << (*ds.label)[i];
    if (ds.prediction) out << ',' << (*ds.prediction)[i];
    if (ds.loss) {
      out << ',';
      format_double(out, (*ds.loss)[i]);
    }
    if (ds.group) out << ',' << (*ds.group)[i];
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("write_csv: write to '" + path + "' failed");
  }
}

Dataset normalize_positive(const Dataset& ds, double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("normalize_positive: delta must be > 0");
  }
  if (ds.n() == 0) {
    throw std::invalid_argument("normalize_positive: empty dataset");
  }
  Dataset out = ds;
  if (out.offset.size() == 0) out.offset = Eigen::VectorXd::Zero(ds.dim());
  for (int j = 0; j < ds.dim(); ++j) {
    const double lo = ds.features.col(j).minCoeff();
    if (lo < delta) {
      const double shift = delta - lo;
      out.features.col(j).array() += shift;
      out.offset(j) += shift;
    }
  }
  return out;
}

Dataset rotate_negative(const Dataset& ds, double A) {
  if (ds.dim() != 2) {
    throw std::invalid_argument("rotate_negative: requires d == 2");
  }
  const double max_x = ds.features.col(0).maxCoeff();
  if (!(A > max_x)) {
    std::ostringstream msg;
    msg << "rotate_negative: A = " << A << " must exceed the max x-coordinate "
        << max_x;
    throw std::invalid_argument(msg.str());
  }
  Dataset out = ds;
  out.features.col(0) = ds.features.col(1);
  out.features.col(1) = (A - ds.features.col(0).array()).matrix();
  out.offset = Eigen::VectorXd::Zero(2);
  return out;
}

double default_rotation_offset(const Dataset& ds) {
  return std::ceil(ds.features.maxCoeff()) + 1.0;
}

Dataset generate_synthetic(const SynthSpec& spec) {
  if (spec.d < 2) {
    throw std::invalid_argument("generate_synthetic: d must be >= 2");
  }
  if (spec.n_major + spec.n_minor == 0) {
    throw std::invalid_argument("generate_synthetic: no rows requested");
  }
  if (spec.n_minor > spec.n_major) {
    throw std::invalid_argument(
        "generate_synthetic: minority larger than majority");
  }
  if (!(spec.sd_major > 0.0) || !(spec.sd_minor > 0.0)) {
    throw std::invalid_argument("generate_synthetic: sd must be > 0");
  }
  if (spec.mean_major.size() != spec.d || spec.mean_minor.size() != spec.d) {
    throw std::invalid_argument("generate_synthetic: mean dimension mismatch");
  }
  const std::size_t n = spec.n_major + spec.n_minor;
  Dataset ds;
  ds.features.resize(static_cast<Eigen::Index>(n), spec.d);
  ds.group = std::vector<int>(n, 0);
  ds.offset = Eigen::VectorXd::Zero(spec.d);
  Rng rng(spec.seed);
  for (std::size_t i = 0; i < n; ++i) {
    const bool minor = i >= spec.n_major;
    const Eigen::VectorXd& mean = minor ? spec.mean_minor : spec.mean_major;
    const double sd = minor ? spec.sd_minor : spec.sd_major;
    for (int j = 0; j < spec.d; ++j) {
      ds.features(static_cast<Eigen::Index>(i), j) = mean(j) + sd * rng.normal();
    }
    (*ds.group)[i] = minor ? 1 : 0;
  }
  return ds;
}

}  // namespace minoria
