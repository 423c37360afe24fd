#include "shapehom/output.hpp"

#include <cstdio>
#include <fstream>

#include "shapehom/errors.hpp"

namespace shapehom {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_triplets(const std::string& path,
                    const Eigen::SparseMatrix<double>& m) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  for (int c = 0; c < m.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it)
      out << it.row() << " " << it.col() << " " << format_double(it.value())
          << "\n";
}

void write_trace_csv(const HomotopyTrace& trace, std::ostream& out,
                     bool zero_timings, bool spacing_column) {
  out << "attempt,t_target,dt,order,accepted,newton_iters,residual,"
         "n_pred_solves,t_pred_ms,t_corr_ms";
  if (spacing_column) out << ",spacing_rejected";
  out << "\n";
  for (const auto& r : trace.records) {
    out << r.attempt << "," << format_double(r.t_target) << ","
        << format_double(r.dt) << "," << r.order << "," << (r.accepted ? 1 : 0)
        << "," << r.newton_iters << "," << format_double(r.residual) << ","
        << r.n_pred_solves << ","
        << format_double(zero_timings ? 0.0 : r.t_pred_ms) << ","
        << format_double(zero_timings ? 0.0 : r.t_corr_ms);
    if (spacing_column) out << "," << (r.spacing_rejected ? 1 : 0);
    out << "\n";
  }
}

SvgPlot::SvgPlot(double xmin, double xmax, double ymin, double ymax, int width,
                 int height, const std::string& title)
    : xmin_(xmin), xmax_(xmax), ymin_(ymin), ymax_(ymax), width_(width),
      height_(height) {
  if (!title.empty())
    body_ += "<text x=\"10\" y=\"18\" font-size=\"14\">" + title + "</text>\n";
}

double SvgPlot::to_px_x(double x) const {
  return 50.0 + (x - xmin_) / (xmax_ - xmin_) * (width_ - 70.0);
}
double SvgPlot::to_px_y(double y) const {
  return (height_ - 40.0) - (y - ymin_) / (ymax_ - ymin_) * (height_ - 70.0);
}

void SvgPlot::polyline(const std::vector<Vec2>& pts, const std::string& color,
                       double stroke_width) {
  if (pts.empty()) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
           format_double(stroke_width) + "\" points=\"";
  char buf[64];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", to_px_x(p.x), to_px_y(p.y));
    body_ += buf;
  }
  body_ += "\"/>\n";
}

void SvgPlot::marker(Vec2 p, const std::string& color, double radius,
                     bool square) {
  char buf[200];
  if (square) {
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                  "fill=\"%s\"/>\n",
                  to_px_x(p.x) - radius, to_px_y(p.y) - radius, 2 * radius,
                  2 * radius, color.c_str());
  } else {
    std::snprintf(buf, sizeof(buf),
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\"/>\n",
                  to_px_x(p.x), to_px_y(p.y), radius, color.c_str());
  }
  body_ += buf;
}

void SvgPlot::axes(const std::string& x_label, const std::string& y_label) {
  char buf[400];
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n"
                "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                "stroke=\"black\"/>\n",
                to_px_x(xmin_), to_px_y(ymin_), to_px_x(xmax_), to_px_y(ymin_),
                to_px_x(xmin_), to_px_y(ymin_), to_px_x(xmin_), to_px_y(ymax_));
  body_ += buf;
  std::snprintf(buf, sizeof(buf),
                "<text x=\"%.2f\" y=\"%d\" font-size=\"12\">%s</text>\n"
                "<text x=\"8\" y=\"%.2f\" font-size=\"12\" "
                "transform=\"rotate(-90 12 %.2f)\">%s</text>\n",
                to_px_x(0.5 * (xmin_ + xmax_)), height_ - 8, x_label.c_str(),
                to_px_y(0.5 * (ymin_ + ymax_)), to_px_y(0.5 * (ymin_ + ymax_)),
                y_label.c_str());
  body_ += buf;
}

void SvgPlot::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write SVG file " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << " "
      << height_ << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_ << "</svg>\n";
}

}  // namespace shapehom
