#include "dimc/experiments/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace dimc {

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* colour(SamplerKind k) {
  switch (k) {
    case SamplerKind::mh: return "#555555";
    case SamplerKind::pmc: return "#8c564b";
    case SamplerKind::mpmc: return "#1f77b4";
    case SamplerKind::sve: return "#ff7f0e";
    case SamplerKind::mabmc: return "#2ca02c";
  }
  return "#000000";
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Tick positions on a 1-2-5 step inside [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw * 0.999) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + 1e-9 * step; k += 1.0)
    out.push_back(std::abs(k * step) < 1e-12 * step ? 0.0 : k * step);
  return out;
}

}  // namespace

const SummaryRow* SweepSummary::find(const std::string& grid_label, SamplerKind sampler) const {
  for (const auto& r : rows)
    if (r.grid_label == grid_label && r.sampler == sampler) return &r;
  return nullptr;
}

std::vector<SamplerKind> SweepSummary::samplers() const {
  std::vector<SamplerKind> out;
  for (const auto& r : rows)
    if (std::find(out.begin(), out.end(), r.sampler) == out.end()) out.push_back(r.sampler);
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";  // no "-0"
  return fmt::format("{:.10g}", v);
}

void write_summary_csv(std::ostream& out, const SweepSummary& summary) {
  out << summary_header << '\n';
  for (const auto& r : summary.rows) {
    out << r.grid_label << ',' << to_string(r.sampler) << ',' << format_number(r.avg_accept) << ','
        << format_number(r.se) << ',' << optional_field(r.accept_per_draw) << ','
        << optional_field(r.decision_mpmc_frac) << ',' << optional_field(r.decision_sve_frac) << ','
        << r.seed_count << '\n';
  }
}

void write_plot_svg(std::ostream& out, const SweepSummary& summary) {
  if (summary.rows.empty()) throw std::invalid_argument("plot needs at least one grid point");
  constexpr double width = 640, height = 420;
  constexpr double left = 70, right = 150, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  double xmin = summary.rows.front().grid_value, xmax = xmin;
  double ymin = summary.rows.front().avg_accept, ymax = ymin;
  for (const auto& r : summary.rows) {
    xmin = std::min(xmin, r.grid_value);
    xmax = std::max(xmax, r.grid_value);
    ymin = std::min(ymin, r.avg_accept);
    ymax = std::max(ymax, r.avg_accept);
  }
  ymin = std::max(0.0, std::floor(ymin * 10 - 1e-9) / 10);
  ymax = std::min(1.0, std::ceil(ymax * 10 + 1e-9) / 10);
  if (ymax <= ymin) ymax = ymin + 0.1;
  if (xmax <= xmin) xmin -= 0.5, xmax += 0.5;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  out << fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      width, height);
  out << fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width,
                     height);
  out << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     left + pw / 2, xml_escape(summary.title));

  // axes
  out << fmt::format(
      "<g stroke=\"black\" fill=\"none\"><line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>"
      "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\"/></g>\n",
      left, top + ph, left + pw, top);
  for (double x : ticks(xmin, xmax))
    out << fmt::format(
        "<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
        "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.3g}</text>\n",
        px(x), top + ph, top + ph + 5, top + ph + 19, x);
  for (double y : ticks(ymin, ymax)) {
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>"
        "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.3g}</text>\n",
        left - 5, py(y), left, left - 8, py(y) + 4, y);
  }
  out << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                     height - 15, xml_escape(summary.x_label));
  out << fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">"
      "average acceptance probability</text>\n",
      top + ph / 2);

  const auto samplers = summary.samplers();
  for (std::size_t s = 0; s < samplers.size(); ++s) {
    std::vector<const SummaryRow*> pts;
    for (const auto& r : summary.rows)
      if (r.sampler == samplers[s]) pts.push_back(&r);
    std::stable_sort(pts.begin(), pts.end(),
                     [](auto* a, auto* b) { return a->grid_value < b->grid_value; });
    const char* c = colour(samplers[s]);
    out << fmt::format("<g id=\"{}\">\n", to_string(samplers[s]));
    if (pts.size() > 1) {
      out << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"", c);
      for (std::size_t i = 0; i < pts.size(); ++i)
        out << fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(pts[i]->grid_value),
                           py(pts[i]->avg_accept));
      out << "\"/>\n";
    }
    for (auto* p : pts)
      out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n",
                         px(p->grid_value), py(p->avg_accept), c);
    out << "</g>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(s);
    out << fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
        "<circle cx=\"{4}\" cy=\"{1}\" r=\"3.5\" fill=\"{3}\"/>"
        "<text x=\"{5}\" y=\"{6}\">{7}</text>\n",
        left + pw + 15, ly, left + pw + 45, c, left + pw + 30, left + pw + 52, ly + 4,
        upper(to_string(samplers[s])));
  }
  out << "</svg>\n";
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  f << contents;
  f.close();
  if (!f) throw std::runtime_error(fmt::format("write failed for '{}'", path.string()));
}

void emit_summary_csv(const SweepSummary& summary, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_summary_csv(ss, summary);
  write_file(path, ss.str());
}

void emit_plot_svg(const SweepSummary& summary, const std::filesystem::path& path) {
  std::ostringstream ss;
  write_plot_svg(ss, summary);
  write_file(path, ss.str());
}

}  // namespace dimc
