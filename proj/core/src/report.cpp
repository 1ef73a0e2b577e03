#include "fakedet/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fakedet/error.hpp"

namespace fakedet {

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

PerturbationKind parse_kind(const std::string& s) {
  if (s == "none") return PerturbationKind::kNone;
  if (s == "blur") return PerturbationKind::kBlur;
  if (s == "jpeg") return PerturbationKind::kJpeg;
  fail(ErrorKind::kIo, "unknown perturbation kind '" + s + "' in CSV");
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "perturbation_kind,perturbation_value,model,accuracy,f1_fake,f1_real,n,"
         "f1_fake_degenerate,f1_real_degenerate\n";
  for (const auto& r : rows) {
    out << to_string(r.kind) << ',' << fmt(r.value) << ',' << r.model << ','
        << fmt(r.report.accuracy, 10) << ',' << fmt(r.report.f1_fake.value, 10) << ','
        << fmt(r.report.f1_real.value, 10) << ',' << r.report.n << ','
        << (r.report.f1_fake.degenerate ? 1 : 0) << ',' << (r.report.f1_real.degenerate ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write " + path.string());
  write_sweep_csv(out, rows);
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::kIo, path.string() + " is empty");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    require(cells.size() >= 7, ErrorKind::kIo, "short CSV row in " + path.string() + ": " + line);
    try {
      SweepRow r;
      r.kind = parse_kind(cells[0]);
      r.value = std::stod(cells[1]);
      r.model = cells[2];
      r.report.accuracy = std::stod(cells[3]);
      r.report.f1_fake.value = std::stod(cells[4]);
      r.report.f1_real.value = std::stod(cells[5]);
      r.report.n = std::stoll(cells[6]);
      if (cells.size() >= 9) {
        r.report.f1_fake.degenerate = cells[7] == "1";
        r.report.f1_real.degenerate = cells[8] == "1";
      }
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      fail(ErrorKind::kIo, "malformed CSV row in " + path.string() + ": " + line);
    }
  }
  return rows;
}

std::string render_accuracy_svg(const std::vector<SweepRow>& rows, PerturbationKind kind,
                                const std::string& title) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : rows)
    if (r.kind == kind) series[r.model].emplace_back(r.value, r.report.accuracy);

  constexpr double kW = 480, kH = 320, kLeft = 60, kRight = 120, kTop = 40, kBottom = 50;
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  double xmin = 0, xmax = 1;
  bool first = true;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      xmin = first ? x : std::min(xmin, x);
      xmax = first ? x : std::max(xmax, x);
      first = false;
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft << "\" y2=\"" << py(1)
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double y = t / 4.0;
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << fmt(y, 3)
        << "</text>\n";
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << py(y) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << py(y)
        << "\" stroke=\"#ddd\"/>\n";
  }
  std::vector<double> xs;
  for (const auto& [name, pts] : series)
    for (const auto& p : pts) xs.push_back(p.first);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  for (double x : xs) {
    svg << "<text x=\"" << px(x) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kH - 10 << "\" text-anchor=\"middle\">"
      << (kind == PerturbationKind::kBlur ? "Gaussian blur sigma" : "JPEG quality") << "</text>\n";
  svg << "<text transform=\"translate(16," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">accuracy</text>\n";

  std::size_t idx = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kColors[idx % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : pts)
      svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = kTop + 14.0 * static_cast<double>(idx);
    svg << "<line x1=\"" << kW - kRight + 10 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 30 << "\" y2=\""
        << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kW - kRight + 34 << "\" y=\"" << ly + 4 << "\">" << name << "</text>\n";
    ++idx;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_markdown_table(const std::vector<SweepRow>& rows) {
  std::ostringstream md;
  md << "| perturbation | value | model | accuracy | F1 (fake) | F1 (real) | n |\n";
  md << "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    md << "| " << to_string(r.kind) << " | " << (r.kind == PerturbationKind::kNone ? "-" : fmt(r.value)) << " | "
       << r.model << " | " << fmt(r.report.accuracy, 4) << " | " << fmt(r.report.f1_fake.value, 4)
       << (r.report.f1_fake.degenerate ? " (undefined)" : "") << " | " << fmt(r.report.f1_real.value, 4)
       << (r.report.f1_real.degenerate ? " (undefined)" : "") << " | " << r.report.n << " |\n";
  }
  return md.str();
}

}  // namespace fakedet
