#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "shapehom/homotopy.hpp"
#include "shapehom/vec2.hpp"

namespace shapehom {

// Trace CSV with the columns
//   attempt,t_target,dt,order,accepted,newton_iters,residual,
//   n_pred_solves,t_pred_ms,t_corr_ms
// plus an optional trailing spacing_rejected column. zero_timings writes
// the timing columns as 0 for bitwise-reproducible output.
void write_trace_csv(const HomotopyTrace& trace, std::ostream& out,
                     bool zero_timings, bool spacing_column = false);

std::string format_double(double v);

// Debug dump: one "row col value" line per stored entry.
void write_triplets(const std::string& path,
                    const Eigen::SparseMatrix<double>& m);

// Minimal polyline/marker SVG canvas with linear axes.
class SvgPlot {
 public:
  SvgPlot(double xmin, double xmax, double ymin, double ymax,
          int width = 640, int height = 480, const std::string& title = "");

  void polyline(const std::vector<Vec2>& pts, const std::string& color,
                double stroke_width = 1.5);
  void marker(Vec2 p, const std::string& color, double radius = 4.0,
              bool square = false);
  void axes(const std::string& x_label, const std::string& y_label);
  void save(const std::string& path) const;

 private:
  double to_px_x(double x) const;
  double to_px_y(double y) const;
  double xmin_, xmax_, ymin_, ymax_;
  int width_, height_;
  std::string body_;
};

}  // namespace shapehom
