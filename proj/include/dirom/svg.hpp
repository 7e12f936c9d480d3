// Copyright 2026 dirom contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace dirom {

/// Static line/scatter chart rendered to standalone SVG.
class SvgPlot {
public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);

  void line(std::vector<double> x, std::vector<double> y, std::string color,
            std::string label = {}, bool dashed = false);
  void scatter(std::vector<double> x, std::vector<double> y, std::string color,
               std::string label = {}, double radius = 2.0);
  void text(double x, double y, std::string s);
  void set_log_y(bool on) { log_y_ = on; }

  std::string render(int width = 720, int height = 460) const;
  void save(const std::string& path, int width = 720, int height = 460) const;

private:
  struct Series {
    std::vector<double> x, y;
    std::string color, label;
    bool scatter = false;
    bool dashed = false;
    double radius = 2.0;
  };
  struct Label {
    double x, y;
    std::string s;
  };
  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
  std::vector<Label> labels_;
  bool log_y_ = false;
};

}  // namespace dirom
