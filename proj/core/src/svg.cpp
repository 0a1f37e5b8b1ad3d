#include "robustam/format.hpp"
#include "robustam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace robustam {

namespace {

constexpr double kDistFloor = 1e-16;  // semilog clamp

struct Frame {
  double width = 720, height = 540;
  double left = 80, right = 40, top = 50, bottom = 70;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

void open_svg(std::ostream& out, const Frame& f) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
      << fmt_double(f.width) << "\" height=\"" << fmt_double(f.height)
      << "\" viewBox=\"0 0 " << fmt_double(f.width) << ' '
      << fmt_double(f.height) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void text(std::ostream& out, double x, double y, const std::string& s,
          const char* anchor = "middle", int size = 13) {
  out << "<text x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(y)
      << "\" font-family=\"sans-serif\" font-size=\"" << size
      << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
}

}  // namespace

void export_phase_grid_svg(const PhaseGrid& grid, std::ostream& out,
                           const std::string& x_label) {
  Frame f;
  f.right = 110;  // room for the rate legend
  open_svg(out, f);

  const std::size_t nx = grid.ratios.size();
  const std::size_t ny = grid.etas.size();
  const double cw = f.plot_w() / static_cast<double>(nx);
  const double ch = f.plot_h() / static_cast<double>(ny);

  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const double rate = grid.cell(i, j).success_rate;
      const int level = static_cast<int>(std::lround(255.0 * rate));
      const double x = f.left + static_cast<double>(i) * cw;
      // Larger eta drawn lower on the plot's y axis.
      const double y = f.top + f.plot_h() - static_cast<double>(j + 1) * ch;
      out << "<rect x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(y)
          << "\" width=\"" << fmt_double(cw) << "\" height=\""
          << fmt_double(ch) << "\" fill=\"rgb(" << level << ',' << level
          << ',' << level << ")\" stroke=\"#999\" stroke-width=\"0.5\"/>\n";
    }
  }

  for (std::size_t i = 0; i < nx; ++i) {
    text(out, f.left + (static_cast<double>(i) + 0.5) * cw,
         f.top + f.plot_h() + 18, fmt_double(grid.ratios[i]));
  }
  for (std::size_t j = 0; j < ny; ++j) {
    text(out, f.left - 8,
         f.top + f.plot_h() - (static_cast<double>(j) + 0.5) * ch + 4,
         fmt_double(grid.etas[j]), "end");
  }
  text(out, f.left + f.plot_w() / 2, f.height - 20, x_label);
  text(out, 24, f.top + f.plot_h() / 2, "eta", "middle");
  text(out, f.left + f.plot_w() / 2, 28, "empirical success rate", "middle",
       15);

  // Legend: vertical gradient strip.
  const double lx = f.left + f.plot_w() + 24;
  const int steps = 16;
  const double lh = f.plot_h() / steps;
  for (int s = 0; s < steps; ++s) {
    const int level =
        static_cast<int>(std::lround(255.0 * (steps - 1 - s) /
                                     static_cast<double>(steps - 1)));
    out << "<rect x=\"" << fmt_double(lx) << "\" y=\""
        << fmt_double(f.top + s * lh) << "\" width=\"18\" height=\""
        << fmt_double(lh) << "\" fill=\"rgb(" << level << ',' << level << ','
        << level << ")\"/>\n";
  }
  text(out, lx + 26, f.top + 10, "1.0", "start", 11);
  text(out, lx + 26, f.top + f.plot_h(), "0.0", "start", 11);

  out << "</svg>\n";
}

void export_traces_svg(const std::vector<IterateTrace>& traces,
                       const IterateTrace& median_trace, std::ostream& out) {
  Frame f;
  open_svg(out, f);

  int max_k = 1;
  double lo = 0.0, hi = -320.0;  // log10 bounds
  auto scan = [&](const IterateTrace& tr) {
    for (const TraceRow& row : tr.rows) {
      if (!std::isfinite(row.dist_to_truth)) continue;
      max_k = std::max(max_k, row.k);
      const double l = std::log10(std::max(row.dist_to_truth, kDistFloor));
      lo = std::min(lo, l);
      hi = std::max(hi, l);
    }
  };
  for (const auto& tr : traces) scan(tr);
  scan(median_trace);
  lo = std::floor(lo) - 0.2;
  hi = std::ceil(std::max(hi, lo + 1.0)) + 0.2;

  auto sx = [&](double k) {
    return f.left + f.plot_w() * k / static_cast<double>(max_k);
  };
  auto sy = [&](double log_dist) {
    return f.top + f.plot_h() * (hi - log_dist) / (hi - lo);
  };

  for (int decade = static_cast<int>(std::ceil(lo));
       decade <= static_cast<int>(std::floor(hi)); ++decade) {
    const double y = sy(decade);
    out << "<line x1=\"" << fmt_double(f.left) << "\" y1=\"" << fmt_double(y)
        << "\" x2=\"" << fmt_double(f.left + f.plot_w()) << "\" y2=\""
        << fmt_double(y) << "\" stroke=\"#ddd\" stroke-width=\"1\"/>\n";
    text(out, f.left - 8, y + 4, "1e" + std::to_string(decade), "end", 11);
  }

  auto polyline = [&](const IterateTrace& tr, const char* stroke,
                      double width) {
    if (tr.rows.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << stroke
        << "\" stroke-width=\"" << fmt_double(width) << "\" points=\"";
    for (const TraceRow& row : tr.rows) {
      if (!std::isfinite(row.dist_to_truth)) continue;
      const double l = std::log10(std::max(row.dist_to_truth, kDistFloor));
      out << fmt_double(sx(row.k)) << ',' << fmt_double(sy(l)) << ' ';
    }
    out << "\"/>\n";
  };

  for (const auto& tr : traces) polyline(tr, "#bbbbbb", 1.0);
  polyline(median_trace, "#1f5fbf", 2.5);

  out << "<line x1=\"" << fmt_double(f.left) << "\" y1=\""
      << fmt_double(f.top + f.plot_h()) << "\" x2=\""
      << fmt_double(f.left + f.plot_w()) << "\" y2=\""
      << fmt_double(f.top + f.plot_h())
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  const int k_step = std::max(1, max_k / 10);
  for (int k = 0; k <= max_k; k += k_step) {
    text(out, sx(k), f.top + f.plot_h() + 18, std::to_string(k));
  }
  text(out, f.left + f.plot_w() / 2, f.height - 20, "outer iteration k");
  text(out, 24, f.top + f.plot_h() / 2, "dist");
  text(out, f.left + f.plot_w() / 2, 28, "distance to the ground truth",
       "middle", 15);

  out << "</svg>\n";
}

}  // namespace robustam
