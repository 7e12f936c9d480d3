// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#include "dirom/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "dirom/common.hpp"

namespace dirom {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::line(std::vector<double> x, std::vector<double> y, std::string color,
                   std::string label, bool dashed) {
  require(x.size() == y.size(), "plot series length mismatch");
  series_.push_back({std::move(x), std::move(y), std::move(color), std::move(label), false, dashed});
}

void SvgPlot::scatter(std::vector<double> x, std::vector<double> y, std::string color,
                      std::string label, double radius) {
  require(x.size() == y.size(), "plot series length mismatch");
  series_.push_back(
      {std::move(x), std::move(y), std::move(color), std::move(label), true, false, radius});
}

void SvgPlot::text(double x, double y, std::string s) { labels_.push_back({x, y, std::move(s)}); }

std::string SvgPlot::render(int width, int height) const {
  const double left = 70, right = 20, top = 36, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto ty = [&](double y) { return log_y_ ? std::log10(std::max(y, 1e-300)) : y; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const Series& s : series_)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (log_y_ && !(s.y[i] > 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.04 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title_) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
    const double X = left + pw * k / 5.0, Y = top + ph * (1.0 - k / 5.0);
    os << "<line x1=\"" << X << "\" y1=\"" << top + ph << "\" x2=\"" << X << "\" y2=\""
       << top + ph + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << X << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
       << tick(xv) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << Y << "\" x2=\"" << left << "\" y2=\"" << Y
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
       << (log_y_ ? "1e" + tick(yv) : tick(yv)) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
     << escape(xlabel_) << "</text>\n";
  os << "<text transform=\"translate(16," << top + ph / 2
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(ylabel_) << "</text>\n";

  for (const Series& s : series_) {
    if (s.scatter) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.y[i]) || (log_y_ && !(s.y[i] > 0.0))) continue;
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"" << s.radius
           << "\" fill=\"" << s.color << "\" fill-opacity=\"0.6\"/>\n";
      }
      continue;
    }
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (log_y_ && !(s.y[i] > 0.0))) continue;
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "\"/>\n";
  }
  for (const Label& l : labels_)
    os << "<text x=\"" << px(l.x) << "\" y=\"" << py(l.y) << "\" text-anchor=\"middle\">"
       << escape(l.s) << "</text>\n";

  double ly = top + 14;
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    os << "<rect x=\"" << left + pw - 150 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
       << s.color << "\"/>\n";
    os << "<text x=\"" << left + pw - 134 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

void SvgPlot::save(const std::string& path, int width, int height) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::io, "cannot write " + path);
  os << render(width, height);
}

}  // namespace dirom
