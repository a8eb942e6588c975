#include "photongun/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "photongun/errors.hpp"
#include "photongun/report.hpp"

namespace photongun::svg {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 78;
constexpr double kRight = 24;
constexpr double kTop = 42;
constexpr double kBottom = 58;

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = 0;
      hi = 1;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.06 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

// 1-2-5 tick positions covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return ticks;
}

std::vector<double> decade_ticks(double lo, double hi) {
  std::vector<double> ticks;
  for (int e = static_cast<int>(std::floor(lo)); e <= static_cast<int>(std::ceil(hi)); ++e) {
    if (e >= lo - 1e-9 && e <= hi + 1e-9) ticks.push_back(e);
  }
  if (ticks.size() < 2) return linear_ticks(lo, hi);
  return ticks;
}

std::string tick_label(double v, bool log_axis) {
  std::ostringstream out;
  if (log_axis) {
    const double value = std::pow(10.0, v);
    if (value >= 0.001 && value < 100000) {
      out << format_number(value);
    } else {
      out << "1e" << static_cast<int>(std::llround(v));
    }
    return out.str();
  }
  const double r = std::abs(v) < 1e-12 ? 0.0 : v;
  if (std::abs(r) >= 0.001 || r == 0.0) {
    std::ostringstream tmp;
    tmp.precision(6);
    tmp << r;
    return tmp.str();
  }
  return format_number(r);
}

}  // namespace

std::string Plot::render() const {
  Range rx, ry;
  auto tx = [&](double v) { return log_x_ ? std::log10(std::max(v, 1e-300)) : v; };
  for (const auto& s : series_) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rx.include(tx(s.x[i]));
      ry.include(s.y[i]);
      if (i < s.y_err.size()) {
        ry.include(s.y[i] + s.y_err[i]);
        ry.include(s.y[i] - s.y_err[i]);
      }
    }
  }
  rx.pad();
  ry.pad();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (tx(v) - rx.lo) / (rx.hi - rx.lo) * plot_w; };
  auto py = [&](double v) { return kTop + (ry.hi - v) / (ry.hi - ry.lo) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"15\">" << title_ << "</text>\n";

  const auto ticks_x = log_x_ ? decade_ticks(rx.lo, rx.hi) : linear_ticks(rx.lo, rx.hi);
  const auto ticks_y = linear_ticks(ry.lo, ry.hi);
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : ticks_x) {
    const double x = kLeft + (t - rx.lo) / (rx.hi - rx.lo) * plot_w;
    out << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">"
        << tick_label(t, log_x_) << "</text>\n";
  }
  for (double t : ticks_y) {
    const double y = py(t);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + plot_w
        << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
        << tick_label(t, false) << "</text>\n";
  }
  out << "</g>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label_
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">" << y_label_ << "</text>\n";

  for (const auto& s : series_) {
    if (s.x.empty()) continue;
    for (std::size_t i = 0; i < s.y_err.size() && i < s.x.size(); ++i) {
      if (s.y_err[i] <= 0) continue;
      const double x = px(s.x[i]);
      out << "<line x1=\"" << x << "\" y1=\"" << py(s.y[i] - s.y_err[i]) << "\" x2=\"" << x
          << "\" y2=\"" << py(s.y[i] + s.y_err[i]) << "\" stroke=\"" << s.color
          << "\" stroke-width=\"1\"/>\n";
    }
    if (s.points) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
            << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    } else if (s.steps) {
      out << "<path d=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double half =
            i + 1 < s.x.size() ? (s.x[i + 1] - s.x[i]) / 2 : (i > 0 ? (s.x[i] - s.x[i - 1]) / 2 : 0.5);
        const double x0 = px(s.x[i] - half);
        const double x1 = px(s.x[i] + half);
        const double y = py(s.y[i]);
        out << (i == 0 ? "M" : "L") << x0 << " " << y << " L" << x1 << " " << y << " ";
      }
      out << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"/>\n";
    } else {
      out << "<path d=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        out << (i == 0 ? "M" : "L") << px(s.x[i]) << " " << py(s.y[i]) << " ";
      }
      out << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\"/>\n";
    }
  }

  double legend_y = kTop + 14;
  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    const double x0 = kLeft + plot_w - 190;
    out << "<line x1=\"" << x0 << "\" y1=\"" << legend_y - 4 << "\" x2=\"" << x0 + 24
        << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << x0 + 30 << "\" y=\"" << legend_y << "\">" << s.label << "</text>\n";
    legend_y += 17;
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

void Plot::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << render();
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

}  // namespace photongun::svg
