#include "aer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "aer/error.hpp"

namespace aer::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

std::string header(const std::string& title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + "<text x=\"" +
         num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         escape(title) + "</text>\n";
}

std::string axes(const Range& xr, const Range& yr, const std::string& xl, const std::string& yl) {
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  std::string s = "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
                  "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double fx = k / 5.0;
    const double px = kLeft + fx * pw;
    const double py = kTop + ph - fx * ph;
    s += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(px) +
         "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(px) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
         num(xr.lo + fx * (xr.hi - xr.lo)) + "</text>\n";
    s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) + "\" text-anchor=\"end\">" +
         num(yr.lo + fx * (yr.hi - yr.lo)) + "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 10) +
       "\" text-anchor=\"middle\">" + escape(xl) + "</text>\n";
  s += "<text x=\"16\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(kTop + ph / 2) + ")\">" + escape(yl) + "</text>\n";
  return s;
}

}  // namespace

std::string line_plot(const std::string& title, const std::string& x_label,
                      const std::string& y_label, const std::vector<LineSeries>& series) {
  Range xr;
  Range yr;
  for (const auto& s : series) {
    if (s.xs.size() != s.ys.size()) throw Error(ErrorCode::InvalidArgument, "series length mismatch");
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      if (!std::isfinite(s.ys[i])) continue;
      xr.add(s.xs[i]);
      yr.add(s.ys[i]);
    }
  }
  xr.pad();
  yr.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string out = header(title) + axes(xr, yr, x_label, y_label);
  double legend_y = kTop + 10;
  for (const auto& s : series) {
    const std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    if (s.markers) {
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.ys[i])) continue;
        out += "<circle cx=\"" + num(px(s.xs[i])) + "\" cy=\"" + num(py(s.ys[i])) +
               "\" r=\"2\" fill=\"" + s.color + "\"/>\n";
      }
    } else {
      std::string pts;
      auto flush = [&] {
        if (!pts.empty()) {
          out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"" + dash +
                 " points=\"" + pts + "\"/>\n";
        }
        pts.clear();
      };
      for (std::size_t i = 0; i < s.xs.size(); ++i) {
        if (!std::isfinite(s.ys[i])) {
          flush();
          continue;
        }
        pts += num(px(s.xs[i])) + "," + num(py(s.ys[i])) + " ";
      }
      flush();
    }
    const double lx = kWidth - kRight + 12;
    out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(legend_y) + "\" x2=\"" + num(lx + 24) +
           "\" y2=\"" + num(legend_y) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"" + dash +
           "/>\n";
    out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(legend_y + 4) + "\">" + escape(s.label) +
           "</text>\n";
    legend_y += 18;
  }
  out += "</svg>\n";
  return out;
}

std::string heatmap(const std::string& title, const std::vector<double>& xs,
                    const std::vector<double>& ts, const std::vector<double>& values) {
  if (xs.empty() || ts.empty() || values.size() != xs.size() * ts.size()) {
    throw Error(ErrorCode::InvalidArgument, "heat map needs values on the x-t lattice");
  }
  Range xr;
  Range tr;
  Range vr;
  for (double x : xs) xr.add(x);
  for (double t : ts) tr.add(t);
  for (double v : values) vr.add(v);
  xr.pad();
  tr.pad();
  vr.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  // Downsample to at most 200 x 100 cells.
  const std::size_t nx = std::min<std::size_t>(xs.size(), 200);
  const std::size_t nt = std::min<std::size_t>(ts.size(), 100);
  const double cw = pw / static_cast<double>(nx);
  const double ch = ph / static_cast<double>(nt);
  auto color = [&](double v) {
    const double s = std::clamp((v - vr.lo) / (vr.hi - vr.lo), 0.0, 1.0);
    const int r = static_cast<int>(255 * s);
    const int b = static_cast<int>(255 * (1.0 - s));
    const int g = static_cast<int>(255 * (1.0 - std::abs(2.0 * s - 1.0)) * 0.6);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  std::string out = header(title) + axes(xr, tr, "x", "t");
  for (std::size_t a = 0; a < nt; ++a) {
    const std::size_t j = a * (ts.size() - 1) / std::max<std::size_t>(nt - 1, 1);
    for (std::size_t b = 0; b < nx; ++b) {
      const std::size_t i = b * (xs.size() - 1) / std::max<std::size_t>(nx - 1, 1);
      out += "<rect x=\"" + num(kLeft + b * cw) + "\" y=\"" + num(kTop + ph - (a + 1) * ch) +
             "\" width=\"" + num(cw + 0.5) + "\" height=\"" + num(ch + 0.5) + "\" fill=\"" +
             color(values[j * xs.size() + i]) + "\"/>\n";
    }
  }
  const double lx = kWidth - kRight + 20;
  for (int k = 0; k <= 10; ++k) {
    const double v = vr.lo + (vr.hi - vr.lo) * k / 10.0;
    const double y = kTop + ph - (k + 1) * ph / 11.0;
    out += "<rect x=\"" + num(lx) + "\" y=\"" + num(y) + "\" width=\"20\" height=\"" +
           num(ph / 11.0) + "\" fill=\"" + color(v) + "\"/>\n";
    out += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(y + ph / 22.0 + 4) + "\">" + num(v) +
           "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace aer::svg
