#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace photongun::svg {

// Standalone SVG line/step plots, enough for sweep overlays, fit overlays
// and correlation histograms. No display dependency.

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> y_err;  // optional, drawn as vertical bars
  std::string label;
  std::string color = "#1f6fb2";
  bool points = false;  // markers instead of a connected line
  bool steps = false;   // step (histogram) rendering
};

class Plot {
 public:
  Plot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void set_log_x(bool log_x) { log_x_ = log_x; }
  void add(Series series) { series_.push_back(std::move(series)); }
  void write(const std::filesystem::path& path) const;
  std::string render() const;

 private:
  std::string title_;
  std::string x_label_;
  std::string y_label_;
  bool log_x_ = false;
  std::vector<Series> series_;
};

}  // namespace photongun::svg
