#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "oad/scheduler.hpp"

namespace oad {

/// Identifies one run in every output row.
struct RunMeta {
  std::string run_id;
  RunMode mode = RunMode::online;
  std::string strategy;  // "-" when the mode does not select
  double rate = 0.0;
  std::string teacher;   // "gt" | "noisy" | "-"
  std::uint64_t seed = 0;
};

struct SummaryRow {
  RunMeta meta;
  std::uint64_t trainings = 0;
  std::uint64_t teacher_calls = 0;
  std::uint64_t train_sample_epochs = 0;
  double overall_mpjpe_px = 0.0;  // frame-weighted over windows >= 1
  std::vector<double> window_mpjpe_px;
};

/// Window 0 is left out of the overall figure unless it is the only window.
SummaryRow summarize(const RunMeta& meta, const RunResult& result);
SummaryRow summarize_offline(const RunMeta& meta, const OfflineSummary& summary);

inline constexpr const char* kWindowCsvHeader =
    "run_id,mode,strategy,rate,teacher,seed,window,model_version,frames,mpjpe_px,trainings,"
    "teacher_calls,train_sample_epochs,boundary";

inline constexpr const char* kSummaryCsvHeader =
    "run_id,mode,strategy,rate,teacher,seed,trainings,teacher_calls,train_sample_epochs,"
    "mpjpe_px,window_mpjpe_px";

void write_window_csv(const RunMeta& meta, std::span<const WindowRecord> records,
                      std::ostream& out);
void write_window_csv(const RunMeta& meta, std::span<const WindowRecord> records,
                      const std::filesystem::path& destination);

/// Long format, one row per run; window_mpjpe_px is ';'-joined.
void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);

/// Method x (teacher, rate) grid of seed-averaged MPJPE, in the order rows
/// first mention each label. Baseline fills every column; continual fills
/// the columns of its teacher.
void write_online_pivot(std::span<const SummaryRow> rows, std::ostream& out);

/// Strategy x rate grid for offline rows; the rate-0 and rate-1 references
/// (strategy "-") are repeated on every strategy row.
void write_offline_pivot(std::span<const SummaryRow> rows, std::ostream& out);

/// Writes `<stem>.csv` (long) and `<stem>_pivot.csv` under `dir`.
void write_summary_files(std::span<const SummaryRow> rows, const std::filesystem::path& dir,
                         const std::string& stem);

struct SeriesRun {
  std::string label;
  std::vector<double> mpjpe_px;  // one value per window
};

struct ReferenceLine {
  std::string label;
  double mpjpe_px = 0.0;
};

/// Standalone SVG line chart, 1000x400: one polyline plus one circle per
/// window for each run, grey verticals at `boundary_windows`, dashed
/// horizontals for the references.
void render_series_svg(std::span<const SeriesRun> runs,
                       std::span<const std::size_t> boundary_windows,
                       std::span<const ReferenceLine> references, std::ostream& out);
void render_series_svg(std::span<const SeriesRun> runs,
                       std::span<const std::size_t> boundary_windows,
                       std::span<const ReferenceLine> references,
                       const std::filesystem::path& destination);

/// Interior activity boundaries (boundary windows other than window 0).
std::vector<std::size_t> boundary_windows(std::span<const WindowRecord> records);

/// "%.6f".
std::string fixed6(double value);

}  // namespace oad
