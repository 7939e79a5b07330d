#include "svg.hpp"

#include <cstdio>

namespace lvc::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

SvgChart::SvgChart(double x_min, double x_max, double y_min, double y_max, std::string title,
                   std::string x_label, std::string y_label)
    : x_min_(x_min),
      x_max_(x_max),
      y_min_(y_min),
      y_max_(y_max),
      title_(std::move(title)),
      x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

double SvgChart::px(double x) const {
  return kLeft + (x - x_min_) / (x_max_ - x_min_) * (kWidth - kLeft - kRight);
}

double SvgChart::py(double y) const {
  return kHeight - kBottom - (y - y_min_) / (y_max_ - y_min_) * (kHeight - kTop - kBottom);
}

void SvgChart::polyline(std::span<const double> xs, std::span<const double> ys,
                        const std::string& color, double width) {
  if (xs.empty()) {
    return;
  }
  body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" + fmt(width) +
           "\" points=\"";
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    body_ += fmt(px(xs[i])) + "," + fmt(py(ys[i])) + " ";
  }
  body_ += "\"/>\n";
}

void SvgChart::band(double x0, double x1, const std::string& color, double opacity) {
  body_ += "<rect x=\"" + fmt(px(x0)) + "\" y=\"" + fmt(kTop) + "\" width=\"" +
           fmt(px(x1) - px(x0)) + "\" height=\"" + fmt(kHeight - kTop - kBottom) + "\" fill=\"" +
           color + "\" fill-opacity=\"" + fmt(opacity) + "\"/>\n";
}

void SvgChart::rect(double x0, double y0, double x1, double y1, const std::string& color) {
  body_ += "<rect x=\"" + fmt(px(x0)) + "\" y=\"" + fmt(py(y1)) + "\" width=\"" +
           fmt(px(x1) - px(x0)) + "\" height=\"" + fmt(py(y0) - py(y1)) + "\" fill=\"" + color +
           "\"/>\n";
}

void SvgChart::legend(const std::string& label, const std::string& color) {
  legend_.emplace_back(label, color);
}

std::string SvgChart::render() const {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += body_;

  const double x0 = px(x_min_), x1 = px(x_max_), y0 = py(y_min_), y1 = py(y_max_);
  out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) +
         "\" height=\"" + fmt(y0 - y1) + "\" fill=\"none\" stroke=\"black\"/>\n";
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double xv = x_min_ + (x_max_ - x_min_) * k / kTicks;
    const double yv = y_min_ + (y_max_ - y_min_) * k / kTicks;
    out += "<line x1=\"" + fmt(px(xv)) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(px(xv)) +
           "\" y2=\"" + fmt(y0 + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(y0 + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
    out += "<line x1=\"" + fmt(x0 - 5) + "\" y1=\"" + fmt(py(yv)) + "\" x2=\"" + fmt(x0) +
           "\" y2=\"" + fmt(py(yv)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt(x0 - 8) + "\" y=\"" + fmt(py(yv) + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + fmt(0.5 * (x0 + x1)) + "\" y=\"" + fmt(kHeight - 15) +
         "\" font-size=\"14\" text-anchor=\"middle\">" + x_label_ + "</text>\n";
  out += "<text x=\"18\" y=\"" + fmt(0.5 * (y0 + y1)) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fmt(0.5 * (y0 + y1)) + ")\">" + y_label_ + "</text>\n";
  out += "<text x=\"" + fmt(0.5 * (x0 + x1)) + "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">" +
         title_ + "</text>\n";
  double ly = kTop + 16;
  for (const auto& [label, color] : legend_) {
    out += "<rect x=\"" + fmt(x1 - 170) + "\" y=\"" + fmt(ly - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    out += "<text x=\"" + fmt(x1 - 152) + "\" y=\"" + fmt(ly) + "\" font-size=\"12\">" + label +
           "</text>\n";
    ly += 18;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace lvc::cli
