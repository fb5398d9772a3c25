#include "svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace overlap::cli {

namespace {

constexpr double kWidth = 520, kHeight = 380, kLeft = 60, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), std::round(v * 100.0) / 100.0);
  return std::string(buf, r.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Maps data ranges onto the plot frame.
struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

Frame frame(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double px = 0.04 * (x1 - x0), py = 0.04 * (y1 - y0);
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

void open(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
          const std::string& yl) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  os << "<path d=\"M" << l << ' ' << t << " L" << l << ' ' << b << " L" << r << ' ' << b
     << "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << f.px(xv) << "\" y=\"" << b + 16 << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    os << "<text x=\"" << l - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
  }
  os << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << escape(xl)
     << "</text>\n";
  os << "<text transform=\"translate(16," << (t + b) / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl)
     << "</text>\n";
}

void vline(std::ostringstream& os, const Frame& f, double x, const std::string& label) {
  if (x < f.x0 || x > f.x1) return;
  os << "<line x1=\"" << f.px(x) << "\" y1=\"" << kTop << "\" x2=\"" << f.px(x) << "\" y2=\"" << kHeight - kBottom
     << "\" stroke=\"crimson\" stroke-dasharray=\"5,3\"/>\n";
  os << "<text x=\"" << f.px(x) + 4 << "\" y=\"" << kTop + 12 << "\" fill=\"crimson\">" << escape(label) << " = "
     << fmt(x) << "</text>\n";
}

}  // namespace

std::string histogram_svg(const harness::Histogram& h, std::optional<double> marker, const std::string& title,
                          const std::string& xlabel) {
  const double hi = h.low + h.width * static_cast<double>(h.density.size());
  double top = 0.0;
  for (double d : h.density) top = std::max(top, d);
  auto f = frame(std::min(h.low, marker.value_or(h.low)), std::max(hi, marker.value_or(hi)), 0.0, top);
  f.y0 = 0.0;
  std::ostringstream os;
  open(os, f, title, xlabel, "density");
  for (std::size_t i = 0; i < h.density.size(); ++i) {
    const double a = h.low + h.width * static_cast<double>(i);
    os << "<rect x=\"" << f.px(a) << "\" y=\"" << f.py(h.density[i]) << "\" width=\""
       << std::max(0.5, f.px(a + h.width) - f.px(a) - 1) << "\" height=\"" << f.py(0) - f.py(h.density[i])
       << "\" fill=\"steelblue\"/>\n";
  }
  if (marker) vline(os, f, *marker, "kappa*");
  os << "</svg>\n";
  return os.str();
}

std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y, std::optional<double> marker,
                        const std::string& title, const std::string& xlabel, const std::string& ylabel) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!x.empty()) {
    const auto [xa, xb] = std::minmax_element(x.begin(), x.end());
    const auto [ya, yb] = std::minmax_element(y.begin(), y.end());
    x0 = *xa, x1 = *xb, y0 = *ya, y1 = *yb;
  }
  const auto f = frame(x0, x1, y0, y1);
  std::ostringstream os;
  open(os, f, title, xlabel, ylabel);
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    os << "<circle cx=\"" << f.px(x[i]) << "\" cy=\"" << f.py(y[i]) << "\" r=\"2.5\" fill=\"steelblue\"/>\n";
  if (marker) vline(os, f, *marker, "kappa**");
  os << "</svg>\n";
  return os.str();
}

std::string diagram_svg(const ph::PersistenceDiagram& pd, const std::string& title) {
  double top = 0.0;
  bool essential = false;
  for (const auto& ft : pd.features) {
    top = std::max(top, ft.birth);
    if (ft.essential()) essential = true;
    else top = std::max(top, ft.death);
  }
  if (top <= 0.0) top = 1.0;
  const double rail = essential ? top * 1.1 : top;
  const auto f = frame(0.0, rail, 0.0, rail);
  std::ostringstream os;
  open(os, f, title, "birth", "death");
  os << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(0) << "\" x2=\"" << f.px(rail) << "\" y2=\"" << f.py(rail)
     << "\" stroke=\"gray\"/>\n";
  if (essential)
    os << "<line x1=\"" << f.px(0) << "\" y1=\"" << f.py(rail) << "\" x2=\"" << f.px(rail) << "\" y2=\""
       << f.py(rail) << "\" stroke=\"gray\" stroke-dasharray=\"2,3\"/>\n";
  const char* colours[] = {"steelblue", "darkorange", "seagreen"};
  for (const auto& ft : pd.features) {
    const double d = ft.essential() ? rail : ft.death;
    os << "<circle cx=\"" << f.px(ft.birth) << "\" cy=\"" << f.py(d) << "\" r=\"3\" fill=\""
       << colours[std::min(ft.dim, 2)] << "\"/>\n";
  }
  for (int k = 0; k <= std::min(pd.max_dim, 2); ++k)
    os << "<text x=\"" << kWidth - kRight - 40 << "\" y=\"" << kHeight - kBottom - 14 * (k + 1) << "\" fill=\""
       << colours[k] << "\">H" << k << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace overlap::cli
