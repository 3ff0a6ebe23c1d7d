#include "sepc/svg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>

#include "sepc/errors.hpp"

namespace sepc {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

const char* point_color(int label) {
  return kPalette[label % 8];
}

}  // namespace

void write_partition_svg(const PartitionModel& model, const LabeledDataset& d,
                         const std::string& path) {
  if (model.dim != 2) {
    throw PlotDimension("plot needs a 2-d model, got " +
                        std::to_string(model.dim) + "-d");
  }
  if (d.dim() != 2) {
    throw PlotDimension("plot needs 2-d data, got " + std::to_string(d.dim()) +
                        "-d");
  }

  // Fit a uniform scale over the data plus ellipsoid centers.
  double x_lo = d.points.col(0).minCoeff(), x_hi = d.points.col(0).maxCoeff();
  double y_lo = d.points.col(1).minCoeff(), y_hi = d.points.col(1).maxCoeff();
  for (Eigen::Index id = 0; id < model.num_regions(); ++id) {
    const Eigen::VectorXd c = model.region(id).e.center();
    x_lo = std::min(x_lo, c(0));
    x_hi = std::max(x_hi, c(0));
    y_lo = std::min(y_lo, c(1));
    y_hi = std::max(y_hi, c(1));
  }
  const double pad = 0.08 * std::max({x_hi - x_lo, y_hi - y_lo, 1e-9});
  x_lo -= pad;
  x_hi += pad;
  y_lo -= pad;
  y_hi += pad;

  const double size = 640.0;
  const double scale = size / std::max(x_hi - x_lo, y_hi - y_lo);
  auto px = [&](double x) { return (x - x_lo) * scale; };
  auto py = [&](double y) { return size - (y - y_lo) * scale; };

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' ' << size
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (Eigen::Index id = 0; id < model.num_regions(); ++id) {
    const PartitionEllipsoid& pe = model.region(id);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pe.e.shape);
    const Eigen::Vector2d c = pe.e.center();
    // Semi-axis lengths are the reciprocals of A's eigenvalues; the
    // screen y-flip negates the rotation angle.
    const double rx = scale / es.eigenvalues()(0);
    const double ry = scale / es.eigenvalues()(1);
    const double angle =
        -std::atan2(es.eigenvectors()(1, 0), es.eigenvectors()(0, 0)) * 180.0 /
        M_PI;
    out << "<ellipse cx=\"0\" cy=\"0\" rx=\"" << rx << "\" ry=\"" << ry
        << "\" transform=\"translate(" << px(c(0)) << ' ' << py(c(1))
        << ") rotate(" << angle << ")\" fill=\"none\" stroke=\""
        << (pe.label > 0 ? kPalette[0] : kPalette[1])
        << "\" stroke-width=\"1.5\"/>\n";
  }

  for (Eigen::Index i = 0; i < d.size(); ++i) {
    out << "<circle cx=\"" << px(d.points(i, 0)) << "\" cy=\""
        << py(d.points(i, 1)) << "\" r=\"3\" fill=\""
        << point_color(d.labels[i]) << "\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("write to " + path + " failed");
}

}  // namespace sepc
