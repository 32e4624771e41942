#include "oad/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "oad/errors.hpp"

namespace oad {

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

namespace {

std::string fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  return buf;
}

std::string percent(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", rate * 100.0);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw IoError("cannot open '" + destination.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& destination) {
  out.flush();
  if (!out) throw IoError("failed writing '" + destination.string() + "'");
}

void write_meta(const RunMeta& meta, std::ostream& out) {
  out << meta.run_id << ',' << to_string(meta.mode) << ',' << meta.strategy << ','
      << fixed6(meta.rate) << ',' << meta.teacher << ',' << meta.seed;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

template <typename T>
void remember(std::vector<T>& seen, const T& value) {
  if (std::find(seen.begin(), seen.end(), value) == seen.end()) seen.push_back(value);
}

struct Mean {
  double sum = 0.0;
  std::size_t count = 0;
  void add(double v) { sum += v; ++count; }
  std::string text() const { return count ? fixed6(sum / static_cast<double>(count)) : ""; }
};

}  // namespace

SummaryRow summarize(const RunMeta& meta, const RunResult& result) {
  SummaryRow row;
  row.meta = meta;
  row.trainings = result.ledger.trainings;
  row.teacher_calls = result.ledger.teacher_calls;
  row.train_sample_epochs = result.ledger.train_sample_epochs;
  double weighted = 0.0;
  std::size_t frames = 0;
  for (const auto& rec : result.records) {
    row.window_mpjpe_px.push_back(rec.mpjpe_px);
    if (rec.window == 0) continue;
    weighted += rec.mpjpe_px * static_cast<double>(rec.frames);
    frames += rec.frames;
  }
  if (frames > 0) {
    row.overall_mpjpe_px = weighted / static_cast<double>(frames);
  } else if (!result.records.empty()) {
    row.overall_mpjpe_px = result.records.front().mpjpe_px;
  }
  return row;
}

SummaryRow summarize_offline(const RunMeta& meta, const OfflineSummary& summary) {
  SummaryRow row;
  row.meta = meta;
  row.trainings = summary.ledger.trainings;
  row.teacher_calls = summary.ledger.teacher_calls;
  row.train_sample_epochs = summary.ledger.train_sample_epochs;
  row.overall_mpjpe_px = summary.mpjpe_px;
  return row;
}

void write_window_csv(const RunMeta& meta, std::span<const WindowRecord> records,
                      std::ostream& out) {
  out << kWindowCsvHeader << '\n';
  for (const auto& rec : records) {
    write_meta(meta, out);
    out << ',' << rec.window << ',' << rec.model_version << ',' << rec.frames << ','
        << fixed6(rec.mpjpe_px) << ',' << rec.ledger.trainings << ',' << rec.ledger.teacher_calls
        << ',' << rec.ledger.train_sample_epochs << ',' << (rec.boundary ? 1 : 0) << '\n';
  }
}

void write_window_csv(const RunMeta& meta, std::span<const WindowRecord> records,
                      const std::filesystem::path& destination) {
  auto out = open_for_write(destination);
  write_window_csv(meta, records, out);
  finish(out, destination);
}

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out) {
  out << kSummaryCsvHeader << '\n';
  for (const auto& row : rows) {
    write_meta(row.meta, out);
    out << ',' << row.trainings << ',' << row.teacher_calls << ',' << row.train_sample_epochs
        << ',' << fixed6(row.overall_mpjpe_px) << ',';
    for (std::size_t i = 0; i < row.window_mpjpe_px.size(); ++i) {
      out << (i ? ";" : "") << fixed6(row.window_mpjpe_px[i]);
    }
    out << '\n';
  }
}

void write_online_pivot(std::span<const SummaryRow> rows, std::ostream& out) {
  std::vector<std::string> strategies;
  std::vector<std::string> teachers;
  std::vector<double> rates;
  for (const auto& row : rows) {
    if (row.meta.mode != RunMode::online) continue;
    remember(strategies, row.meta.strategy);
    remember(teachers, row.meta.teacher);
    remember(rates, row.meta.rate);
  }

  struct Line {
    std::string method;
    std::uint64_t trainings = 0;
    std::map<std::pair<std::string, double>, Mean> cells;
  };
  std::vector<Line> lines;
  auto line_for = [&](const std::string& method) -> Line& {
    for (auto& l : lines) {
      if (l.method == method) return l;
    }
    lines.push_back({method, 0, {}});
    return lines.back();
  };
  // Reference rows first.
  for (RunMode mode : {RunMode::baseline, RunMode::continual}) {
    for (const auto& row : rows) {
      if (row.meta.mode != mode) continue;
      Line& line = line_for(std::string(to_string(mode)));
      line.trainings = row.trainings;
      for (const auto& t : teachers) {
        if (mode == RunMode::continual && t != row.meta.teacher) continue;
        for (double r : rates) line.cells[{t, r}].add(row.overall_mpjpe_px);
      }
    }
  }
  for (const auto& s : strategies) {
    Line& line = line_for(s);
    for (const auto& row : rows) {
      if (row.meta.mode != RunMode::online || row.meta.strategy != s) continue;
      line.trainings = row.trainings;
      line.cells[{row.meta.teacher, row.meta.rate}].add(row.overall_mpjpe_px);
    }
  }

  out << "method,trainings";
  for (const auto& t : teachers) {
    for (double r : rates) out << ',' << t << '@' << percent(r);
  }
  out << '\n';
  for (const auto& line : lines) {
    out << line.method << ',' << line.trainings;
    for (const auto& t : teachers) {
      for (double r : rates) {
        auto it = line.cells.find({t, r});
        out << ',' << (it == line.cells.end() ? std::string() : it->second.text());
      }
    }
    out << '\n';
  }
}

void write_offline_pivot(std::span<const SummaryRow> rows, std::ostream& out) {
  std::vector<std::string> strategies;
  std::vector<double> rates;
  for (const auto& row : rows) {
    if (row.meta.mode != RunMode::offline) continue;
    if (row.meta.strategy != "-") remember(strategies, row.meta.strategy);
    remember(rates, row.meta.rate);
  }
  std::sort(rates.begin(), rates.end());

  out << "strategy";
  for (double r : rates) out << ',' << percent(r);
  out << '\n';
  for (const auto& s : strategies) {
    out << s;
    for (double r : rates) {
      Mean cell;
      for (const auto& row : rows) {
        if (row.meta.mode != RunMode::offline || row.meta.rate != r) continue;
        if (row.meta.strategy == s || row.meta.strategy == "-") cell.add(row.overall_mpjpe_px);
      }
      out << ',' << cell.text();
    }
    out << '\n';
  }
}

void write_summary_files(std::span<const SummaryRow> rows, const std::filesystem::path& dir,
                         const std::string& stem) {
  const auto long_path = dir / (stem + ".csv");
  auto long_out = open_for_write(long_path);
  write_summary_csv(rows, long_out);
  finish(long_out, long_path);

  const bool offline = std::any_of(rows.begin(), rows.end(),
                                   [](const SummaryRow& r) { return r.meta.mode == RunMode::offline; });
  const auto pivot_path = dir / (stem + "_pivot.csv");
  auto pivot_out = open_for_write(pivot_path);
  if (offline) {
    write_offline_pivot(rows, pivot_out);
  } else {
    write_online_pivot(rows, pivot_out);
  }
  finish(pivot_out, pivot_path);
}

std::vector<std::size_t> boundary_windows(std::span<const WindowRecord> records) {
  std::vector<std::size_t> out;
  for (const auto& rec : records) {
    if (rec.boundary && rec.window != 0) out.push_back(rec.window);
  }
  return out;
}

void render_series_svg(std::span<const SeriesRun> runs,
                       std::span<const std::size_t> boundary_windows,
                       std::span<const ReferenceLine> references, std::ostream& out) {
  require(!runs.empty(), "chart needs at least one run");
  static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                             "#bcbd22", "#17becf"};
  constexpr double width = 1000.0, height = 400.0;
  constexpr double left = 60.0, right = 180.0, top = 20.0, bottom = 40.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  std::size_t windows = 1;
  double y_max = 1.0;
  for (const auto& run : runs) {
    windows = std::max(windows, run.mpjpe_px.size());
    for (double v : run.mpjpe_px) y_max = std::max(y_max, v);
  }
  for (const auto& ref : references) y_max = std::max(y_max, ref.mpjpe_px);
  y_max = std::ceil(y_max * 1.1);
  const double x_span = static_cast<double>(std::max<std::size_t>(windows - 1, 1));
  auto sx = [&](double w) { return left + plot_w * w / x_span; };
  auto sy = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"400\" "
         "viewBox=\"0 0 1000 400\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"400\" fill=\"white\"/>\n";

  // Axes with 10 ticks each.
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top + plot_h) << "\" x2=\""
      << fixed2(left + plot_w) << "\" y2=\"" << fixed2(top + plot_h) << "\"/>\n";
  out << "<line x1=\"" << fixed2(left) << "\" y1=\"" << fixed2(top) << "\" x2=\"" << fixed2(left)
      << "\" y2=\"" << fixed2(top + plot_h) << "\"/>\n";
  out << "</g>\n<g fill=\"black\">\n";
  for (int i = 0; i <= 10; ++i) {
    const double xv = x_span * i / 10.0;
    const double yv = y_max * i / 10.0;
    out << "<text x=\"" << fixed2(sx(xv)) << "\" y=\"" << fixed2(top + plot_h + 15)
        << "\" text-anchor=\"middle\">" << fixed2(xv) << "</text>\n";
    out << "<text x=\"" << fixed2(left - 5) << "\" y=\"" << fixed2(sy(yv) + 4)
        << "\" text-anchor=\"end\">" << fixed2(yv) << "</text>\n";
  }
  out << "<text x=\"" << fixed2(left + plot_w / 2) << "\" y=\"" << fixed2(height - 5)
      << "\" text-anchor=\"middle\">window</text>\n";
  out << "<text x=\"15\" y=\"" << fixed2(top + plot_h / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 " << fixed2(top + plot_h / 2)
      << ")\">MPJPE (px)</text>\n";
  out << "</g>\n";

  out << "<g stroke=\"#b0b0b0\" stroke-width=\"1\">\n";
  for (std::size_t w : boundary_windows) {
    out << "<line class=\"boundary\" x1=\"" << fixed2(sx(static_cast<double>(w))) << "\" y1=\""
        << fixed2(top) << "\" x2=\"" << fixed2(sx(static_cast<double>(w))) << "\" y2=\""
        << fixed2(top + plot_h) << "\"/>\n";
  }
  out << "</g>\n";

  double legend_y = top + 10;
  for (std::size_t r = 0; r < references.size(); ++r) {
    const auto& ref = references[r];
    const char* color = r == 0 ? "black" : "#2ca02c";
    out << "<line class=\"reference\" x1=\"" << fixed2(left) << "\" y1=\""
        << fixed2(sy(ref.mpjpe_px)) << "\" x2=\"" << fixed2(left + plot_w) << "\" y2=\""
        << fixed2(sy(ref.mpjpe_px)) << "\" stroke=\"" << color
        << "\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << fixed2(left + plot_w + 10) << "\" y=\"" << fixed2(legend_y)
        << "\" fill=\"" << color << "\">" << xml_escape(ref.label) << "</text>\n";
    legend_y += 14;
  }

  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    const char* color = kPalette[r % std::size(kPalette)];
    out << "<g class=\"run\" stroke=\"" << color << "\" fill=\"" << color << "\">\n";
    out << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < run.mpjpe_px.size(); ++i) {
      out << (i ? " " : "") << fixed2(sx(static_cast<double>(i))) << ','
          << fixed2(sy(run.mpjpe_px[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < run.mpjpe_px.size(); ++i) {
      out << "<circle cx=\"" << fixed2(sx(static_cast<double>(i))) << "\" cy=\""
          << fixed2(sy(run.mpjpe_px[i])) << "\" r=\"2.5\"/>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << fixed2(left + plot_w + 10) << "\" y=\"" << fixed2(legend_y)
        << "\" fill=\"" << color << "\">" << xml_escape(run.label) << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
}

void render_series_svg(std::span<const SeriesRun> runs,
                       std::span<const std::size_t> boundary_windows,
                       std::span<const ReferenceLine> references,
                       const std::filesystem::path& destination) {
  auto out = open_for_write(destination);
  render_series_svg(runs, boundary_windows, references, out);
  finish(out, destination);
}

}  // namespace oad
