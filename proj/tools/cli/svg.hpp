#pragma once

#include <span>
#include <string>
#include <vector>

namespace lvc::cli {

// Minimal standalone SVG chart: data-space polylines, vertical bands,
// filled rectangles and tick labels on a fixed-size canvas.
class SvgChart {
 public:
  SvgChart(double x_min, double x_max, double y_min, double y_max, std::string title,
           std::string x_label, std::string y_label);

  void polyline(std::span<const double> xs, std::span<const double> ys, const std::string& color,
                double width = 1.5);
  void band(double x0, double x1, const std::string& color, double opacity);
  void rect(double x0, double y0, double x1, double y1, const std::string& color);
  void legend(const std::string& label, const std::string& color);

  [[nodiscard]] std::string render() const;

 private:
  [[nodiscard]] double px(double x) const;
  [[nodiscard]] double py(double y) const;

  double x_min_, x_max_, y_min_, y_max_;
  std::string title_, x_label_, y_label_;
  std::string body_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

}  // namespace lvc::cli
