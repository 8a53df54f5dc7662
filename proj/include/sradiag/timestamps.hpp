// ============================================================================
// timestamps.hpp -- detector time-tag ingestion and inter-arrival extraction
//
// Ticks are integer nanoseconds. Two on-disk layouts are supported: decimal
// text (one tick per line, LF or CRLF) and headerless packed little-endian
// uint64. Acquisition metadata lives in a JSON sidecar next to the data file.
// ============================================================================
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sradiag {

using Tick = std::uint64_t;

enum class AcquisitionMode { free_run, gated };

enum class TimestampFormat { text_lines, binary_le64 };

struct AcquisitionMeta {
  AcquisitionMode mode = AcquisitionMode::free_run;
  std::optional<std::uint64_t> gate_period_ns;  // required iff gated
  std::uint64_t dead_time_ns = 0;
  std::string source_label;

  /// Throws Error(config) when gated without a positive gate period.
  void validate() const;

  bool operator==(const AcquisitionMeta&) const = default;
};

/// Non-decreasing sequence of event times.
class TimestampSeries {
public:
  TimestampSeries() = default;

  /// Validates ordering; throws OrderingError at the first decreasing tick.
  explicit TimestampSeries(std::vector<Tick> ticks, AcquisitionMeta meta = {});

  [[nodiscard]] std::span<const Tick> ticks() const noexcept { return ticks_; }
  [[nodiscard]] const AcquisitionMeta& meta() const noexcept { return meta_; }
  [[nodiscard]] std::size_t size() const noexcept { return ticks_.size(); }
  [[nodiscard]] bool empty() const noexcept { return ticks_.empty(); }

  bool operator==(const TimestampSeries&) const = default;

private:
  std::vector<Tick> ticks_;
  AcquisitionMeta meta_;
};

/// Strictly positive gaps between consecutive usable ticks, in nanoseconds.
///
/// Intervals are stored as doubles so that synthetic real-valued samples can
/// flow through the same fitting and diagnostics paths as tick-derived data.
class InterArrivalSeries {
public:
  InterArrivalSeries() = default;

  /// Throws Error(domain) if any interval is not finite and positive.
  explicit InterArrivalSeries(std::vector<double> intervals_ns,
                              AcquisitionMeta source_meta = {});

  [[nodiscard]] std::span<const double> intervals() const noexcept { return intervals_; }
  [[nodiscard]] const AcquisitionMeta& source_meta() const noexcept { return meta_; }
  [[nodiscard]] std::size_t size() const noexcept { return intervals_.size(); }
  [[nodiscard]] bool empty() const noexcept { return intervals_.empty(); }

private:
  std::vector<double> intervals_;
  AcquisitionMeta meta_;
};

TimestampSeries parse_timestamps(std::span<const std::byte> raw, TimestampFormat format,
                                 AcquisitionMeta meta = {});
TimestampSeries parse_timestamps(std::string_view raw, TimestampFormat format,
                                 AcquisitionMeta meta = {});

/// Text output uses LF line endings.
std::string write_timestamps(const TimestampSeries& series, TimestampFormat format);

/// intervals[k] = ticks[k+1] - ticks[k]. Zero gaps are dropped when dedup is
/// set and rejected with Error(duplicate_tick) otherwise.
InterArrivalSeries inter_arrivals(const TimestampSeries& series, bool dedup);

// --- files -------------------------------------------------------------------

/// `.bin` and `.le64` map to binary_le64, everything else to text_lines.
TimestampFormat format_from_path(const std::filesystem::path& path);

/// Sidecar path for a data file: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& data_path);

std::string meta_to_json(const AcquisitionMeta& meta);
AcquisitionMeta meta_from_json(std::string_view json_text);

/// Loads a timestamp file, picking up the sidecar descriptor when present.
TimestampSeries load_timestamps(const std::filesystem::path& path,
                                std::optional<TimestampFormat> format = std::nullopt);

void save_timestamps(const std::filesystem::path& path, const TimestampSeries& series,
                     std::optional<TimestampFormat> format = std::nullopt);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace sradiag
