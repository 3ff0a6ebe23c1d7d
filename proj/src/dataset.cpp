#include "sepc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sepc/errors.hpp"
#include "sepc/mve.hpp"
#include "sepc/rng.hpp"

namespace sepc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc{} && res.ptr == end && std::isfinite(out);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::Index column_index(const std::vector<std::string>& names,
                          const std::string& column) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == column) return static_cast<Eigen::Index>(i);
  }
  // Fall back to a decimal index.
  double idx;
  if (parse_double(column, idx) && idx >= 0 &&
      idx < static_cast<double>(names.size()) && idx == std::floor(idx)) {
    return static_cast<Eigen::Index>(idx);
  }
  return -1;
}

LabeledDataset assemble(const std::vector<std::vector<double>>& rows,
                        const std::vector<double>& raw_labels,
                        std::vector<std::string> feature_names) {
  LabeledDataset d;
  d.feature_names = std::move(feature_names);
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nc = nr > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  d.points.resize(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) d.points(i, j) = rows[i][j];
  }

  // Remap distinct label values (ascending) onto 0..k-1.
  std::map<long long, int> remap;
  for (double v : raw_labels) remap.emplace(static_cast<long long>(std::llround(v)), 0);
  int next = 0;
  for (auto& [value, id] : remap) {
    id = next++;
    d.class_values.push_back(std::to_string(value));
  }
  d.labels.reserve(raw_labels.size());
  for (double v : raw_labels) {
    d.labels.push_back(remap[static_cast<long long>(std::llround(v))]);
  }
  return d;
}

}  // namespace

std::vector<Eigen::Index> LabeledDataset::rows_of_class(int c) const {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (labels[i] == c) rows.push_back(i);
  }
  return rows;
}

LabeledDataset load_csv(const std::string& path, const std::string& label_column,
                        bool has_header) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  std::vector<std::string> names;
  Eigen::Index ncols = -1;

  if (has_header) {
    if (!std::getline(in, line)) throw EmptyFile(path + " has no header line");
    names = split_line(line);
    ncols = static_cast<Eigen::Index>(names.size());
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> raw_labels;
  Eigen::Index label_col = -1;
  long row_no = 0;

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_line(line);
    if (ncols < 0) {
      ncols = static_cast<Eigen::Index>(cells.size());
      for (Eigen::Index j = 0; j < ncols; ++j) {
        names.push_back("col" + std::to_string(j));
      }
    }
    if (label_col < 0) {
      label_col = column_index(names, label_column);
      if (label_col < 0) {
        throw MissingLabel("no column named '" + label_column + "' in " + path);
      }
    }
    if (static_cast<Eigen::Index>(cells.size()) != ncols) {
      throw ParseError("row " + std::to_string(row_no) + ": expected " +
                       std::to_string(ncols) + " cells, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> feat;
    feat.reserve(ncols - 1);
    for (Eigen::Index j = 0; j < ncols; ++j) {
      double v;
      if (!parse_double(cells[j], v)) {
        throw ParseError("row " + std::to_string(row_no) + ", column " +
                         names[j] + ": cannot parse '" + cells[j] + "'");
      }
      if (j == label_col) {
        if (std::abs(v - std::llround(v)) > 1e-9) {
          throw ParseError("row " + std::to_string(row_no) +
                           ": label value " + cells[j] + " is not an integer");
        }
        raw_labels.push_back(v);
      } else {
        feat.push_back(v);
      }
    }
    rows.push_back(std::move(feat));
  }

  if (rows.empty()) throw EmptyFile(path + " has no data rows");

  std::vector<std::string> feature_names;
  for (Eigen::Index j = 0; j < ncols; ++j) {
    if (j != label_col) feature_names.push_back(names[j]);
  }
  return assemble(rows, raw_labels, std::move(feature_names));
}

Eigen::MatrixXd load_matrix_csv(const std::string& path, bool has_header,
                                const std::string& drop_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  Eigen::Index drop = -1;
  Eigen::Index ncols = -1;
  if (has_header) {
    if (!std::getline(in, line)) throw EmptyFile(path + " has no header line");
    const auto names = split_line(line);
    ncols = static_cast<Eigen::Index>(names.size());
    if (!drop_column.empty()) {
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == drop_column) drop = static_cast<Eigen::Index>(i);
      }
    }
  }
  std::vector<std::vector<double>> rows;
  long row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_line(line);
    if (ncols < 0) ncols = static_cast<Eigen::Index>(cells.size());
    if (static_cast<Eigen::Index>(cells.size()) != ncols) {
      throw ParseError("row " + std::to_string(row_no) + ": expected " +
                       std::to_string(ncols) + " cells, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> feat;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (j == drop) continue;
      double v;
      if (!parse_double(cells[j], v)) {
        throw ParseError("row " + std::to_string(row_no) + ", column " +
                         std::to_string(j) + ": cannot parse '" + cells[j] +
                         "'");
      }
      feat.push_back(v);
    }
    rows.push_back(std::move(feat));
  }
  if (rows.empty()) throw EmptyFile(path + " has no data rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

void save_csv(const LabeledDataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    out << (j < static_cast<Eigen::Index>(d.feature_names.size())
                ? d.feature_names[j]
                : "f" + std::to_string(j))
        << ',';
  }
  out << "label\n";
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    for (Eigen::Index j = 0; j < d.dim(); ++j) {
      out << format_value(d.points(i, j)) << ',';
    }
    out << d.class_values[d.labels[i]] << '\n';
  }
}

LabeledDataset filter_rows(const LabeledDataset& d, const std::string& column,
                           double value) {
  const Eigen::Index col = column_index(d.feature_names, column);
  if (col < 0) throw InvalidParam("no feature column named '" + column + "'");
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (std::abs(d.points(i, col) - value) <= 1e-9) keep.push_back(i);
  }
  return subset(d, keep);
}

LabeledDataset subset(const LabeledDataset& d,
                      const std::vector<Eigen::Index>& rows) {
  LabeledDataset out;
  out.feature_names = d.feature_names;
  out.class_values = d.class_values;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), d.dim());
  out.labels.reserve(rows.size());
  Eigen::Index r = 0;
  for (Eigen::Index i : rows) {
    out.points.row(r++) = d.points.row(i);
    out.labels.push_back(d.labels[i]);
  }
  return out;
}

LabeledDataset gen_xor() {
  LabeledDataset d;
  d.points.resize(4, 2);
  d.points << 0, 0, 0, 1, 1, 0, 1, 1;
  d.labels = {0, 1, 1, 0};
  d.feature_names = {"x", "y"};
  d.class_values = {"0", "1"};
  return d;
}

LabeledDataset gen_circles(int n_points, double noise, std::uint64_t seed) {
  if (n_points < 4) throw InvalidParam("need at least 4 points");
  if (noise < 0.0) throw InvalidParam("noise must be nonnegative");
  Rng rng(seed);
  const int n_out = n_points / 2;
  const int n_in = n_points - n_out;
  LabeledDataset d;
  d.points.resize(n_points, 2);
  d.labels.assign(n_points, 0);
  for (int i = 0; i < n_out; ++i) {
    const double t = 2.0 * M_PI * i / n_out;
    d.points(i, 0) = std::cos(t) + noise * rng.normal();
    d.points(i, 1) = std::sin(t) + noise * rng.normal();
  }
  for (int i = 0; i < n_in; ++i) {
    const double t = 2.0 * M_PI * i / n_in;
    d.points(n_out + i, 0) = 0.5 * std::cos(t) + noise * rng.normal();
    d.points(n_out + i, 1) = 0.5 * std::sin(t) + noise * rng.normal();
    d.labels[n_out + i] = 1;
  }
  d.feature_names = {"x", "y"};
  d.class_values = {"0", "1"};
  return d;
}

LabeledDataset gen_moons(int n_points, double noise, std::uint64_t seed) {
  if (n_points < 4) throw InvalidParam("need at least 4 points");
  if (noise < 0.0) throw InvalidParam("noise must be nonnegative");
  Rng rng(seed);
  const int n_out = n_points / 2;
  const int n_in = n_points - n_out;
  LabeledDataset d;
  d.points.resize(n_points, 2);
  d.labels.assign(n_points, 0);
  for (int i = 0; i < n_out; ++i) {
    const double t = M_PI * i / std::max(n_out - 1, 1);
    d.points(i, 0) = std::cos(t) + noise * rng.normal();
    d.points(i, 1) = std::sin(t) + noise * rng.normal();
  }
  for (int i = 0; i < n_in; ++i) {
    const double t = M_PI * i / std::max(n_in - 1, 1);
    d.points(n_out + i, 0) = 1.0 - std::cos(t) + noise * rng.normal();
    d.points(n_out + i, 1) = 0.5 - std::sin(t) + noise * rng.normal();
    d.labels[n_out + i] = 1;
  }
  d.feature_names = {"x", "y"};
  d.class_values = {"0", "1"};
  return d;
}

LabeledDataset gen_gaussians(int n_per_class, double separation,
                             std::uint64_t seed) {
  if (n_per_class < 2) throw InvalidParam("need at least 2 points per class");
  if (separation < 0.0) throw InvalidParam("separation must be nonnegative");
  Rng rng(seed);
  LabeledDataset d;
  d.points.resize(2 * n_per_class, 2);
  d.labels.assign(2 * n_per_class, 0);
  for (int c = 0; c < 2; ++c) {
    const double mx = (c == 0 ? -0.5 : 0.5) * separation;
    for (int i = 0; i < n_per_class; ++i) {
      const int r = c * n_per_class + i;
      d.points(r, 0) = mx + rng.normal();
      d.points(r, 1) = rng.normal();
      d.labels[r] = c;
    }
  }
  d.feature_names = {"x", "y"};
  d.class_values = {"0", "1"};
  return d;
}

LabeledDataset jitter_constant_features(const LabeledDataset& d,
                                        double radius_frac, std::uint64_t seed) {
  if (radius_frac <= 0.0) throw InvalidParam("radius_frac must be positive");
  LabeledDataset out = d;
  Rng rng(seed);
  for (Eigen::Index j = 0; j < d.dim(); ++j) {
    const double lo = d.points.col(j).minCoeff();
    const double hi = d.points.col(j).maxCoeff();
    if (hi - lo > 0.0) continue;
    const double radius =
        radius_frac * std::max(1.0, d.points.col(j).cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      out.points(i, j) += rng.uniform(-radius, radius);
    }
  }
  return out;
}

SplitIndices split(const LabeledDataset& d, double test_fraction,
                   std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidParam("test_fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  SplitIndices out;
  for (int c = 0; c < d.num_classes(); ++c) {
    auto rows = d.rows_of_class(c);
    rng.shuffle(rows);
    const auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      (i < n_test ? out.test : out.train).push_back(rows[i]);
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<Eigen::Index>> kfold(const LabeledDataset& d, int k,
                                             std::uint64_t seed) {
  if (k < 2) throw InvalidParam("k must be at least 2");
  Rng rng(seed);
  std::vector<std::vector<Eigen::Index>> folds(k);
  for (int c = 0; c < d.num_classes(); ++c) {
    auto rows = d.rows_of_class(c);
    if (static_cast<int>(rows.size()) < k) {
      throw ClassTooSmall("class " + d.class_values[c] + " has " +
                          std::to_string(rows.size()) + " points, fewer than " +
                          std::to_string(k) + " folds");
    }
    rng.shuffle(rows);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      folds[i % k].push_back(rows[i]);
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

OvrReport ovr_report(const LabeledDataset& d, int class_a, int class_b,
                     double tol_fit, double tol_membership) {
  if (class_a == class_b || class_a < 0 || class_b < 0 ||
      class_a >= d.num_classes() || class_b >= d.num_classes()) {
    throw InvalidParam("invalid class pair");
  }
  const auto rows_a = d.rows_of_class(class_a);
  const auto rows_b = d.rows_of_class(class_b);
  const LabeledDataset da = subset(d, rows_a);
  const LabeledDataset db = subset(d, rows_b);

  auto fit = [&](const Eigen::MatrixXd& pts, int cls) {
    try {
      return mve_fit(pts, tol_fit);
    } catch (const RankDeficient& e) {
      throw RankDeficient(std::string(e.what()) + " (class " +
                          d.class_values[cls] +
                          "; jitter constant features and retry)");
    }
  };
  const Ellipsoid ea = fit(da.points, class_a).ellipsoid;
  const Ellipsoid eb = fit(db.points, class_b).ellipsoid;

  OvrReport rep;
  rep.volume_a = volume_measure(ea);
  rep.volume_b = volume_measure(eb);

  std::vector<Eigen::Index> overlap_rows;
  auto tally = [&](const LabeledDataset& part, Eigen::Index& in,
                   Eigen::Index& out) {
    for (Eigen::Index i = 0; i < part.size(); ++i) {
      const Eigen::VectorXd p = part.points.row(i);
      if (contains(ea, p, tol_membership) && contains(eb, p, tol_membership)) {
        ++in;
      } else {
        ++out;
      }
    }
  };
  tally(da, rep.in_overlap_a, rep.out_overlap_a);
  tally(db, rep.in_overlap_b, rep.out_overlap_b);

  Eigen::MatrixXd overlap_pts(rep.in_overlap_a + rep.in_overlap_b, d.dim());
  Eigen::Index r = 0;
  for (const auto* part : {&da, &db}) {
    for (Eigen::Index i = 0; i < part->size(); ++i) {
      const Eigen::VectorXd p = part->points.row(i);
      if (contains(ea, p, tol_membership) && contains(eb, p, tol_membership)) {
        overlap_pts.row(r++) = p;
      }
    }
  }

  if (overlap_pts.rows() > d.dim()) {
    try {
      const Ellipsoid eo = mve_fit(overlap_pts, tol_fit).ellipsoid;
      rep.overlap_volume = volume_measure(eo);
      rep.ovr_a = *rep.overlap_volume / rep.volume_a;
      rep.ovr_b = *rep.overlap_volume / rep.volume_b;
    } catch (const RankDeficient&) {
      // Degenerate overlap cloud: treated the same as too few points.
    }
  }
  return rep;
}

}  // namespace sepc
