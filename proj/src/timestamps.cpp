#include "sradiag/timestamps.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sradiag/error.hpp"

namespace sradiag {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::duplicate_tick: return "duplicate_tick";
    case ErrorKind::bounds: return "bounds";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::domain: return "domain";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::model_mismatch: return "model_mismatch";
    case ErrorKind::shape: return "shape";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

void AcquisitionMeta::validate() const {
  if (mode == AcquisitionMode::gated && (!gate_period_ns || *gate_period_ns == 0)) {
    throw Error(ErrorKind::config, "gated acquisition requires gate_period_ns > 0");
  }
}

TimestampSeries::TimestampSeries(std::vector<Tick> ticks, AcquisitionMeta meta)
: ticks_(std::move(ticks)), meta_(std::move(meta)) {
  for (std::size_t i = 1; i < ticks_.size(); ++i) {
    if (ticks_[i] < ticks_[i - 1]) {
      throw OrderingError("decreasing tick " + std::to_string(ticks_[i]) + " after " +
                              std::to_string(ticks_[i - 1]),
                          i);
    }
  }
}

InterArrivalSeries::InterArrivalSeries(std::vector<double> intervals_ns,
                                       AcquisitionMeta source_meta)
: intervals_(std::move(intervals_ns)), meta_(std::move(source_meta)) {
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (!(intervals_[i] > 0.0) || !std::isfinite(intervals_[i])) {
      throw Error(ErrorKind::domain,
                  "interval " + std::to_string(i) + " is not a positive finite duration");
    }
  }
}

namespace {

std::vector<Tick> parse_text(std::string_view text) {
  std::vector<Tick> ticks;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::size_t end = eol;
    if (end > pos && text[end - 1] == '\r') --end;

    if (end == pos) throw ParseError("empty line", pos);

    Tick value = 0;
    for (std::size_t i = pos; i < end; ++i) {
      const char c = text[i];
      if (c < '0' || c > '9') {
        throw ParseError(std::string("unexpected character '") + c + "'", i);
      }
      const Tick digit = static_cast<Tick>(c - '0');
      if (value > (UINT64_MAX - digit) / 10) throw ParseError("tick overflows uint64", pos);
      value = value * 10 + digit;
    }
    ticks.push_back(value);
    pos = eol + 1;
  }
  return ticks;
}

std::vector<Tick> parse_binary(std::span<const std::byte> raw) {
  if (raw.size() % 8 != 0) {
    throw ParseError("truncated 64-bit record", raw.size() - raw.size() % 8);
  }
  std::vector<Tick> ticks(raw.size() / 8);
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    Tick v = 0;
    for (int b = 7; b >= 0; --b) {
      v = (v << 8) | static_cast<Tick>(std::to_integer<unsigned>(raw[i * 8 + b]));
    }
    ticks[i] = v;
  }
  return ticks;
}

}  // namespace

TimestampSeries parse_timestamps(std::span<const std::byte> raw, TimestampFormat format,
                                 AcquisitionMeta meta) {
  std::vector<Tick> ticks;
  if (format == TimestampFormat::binary_le64) {
    ticks = parse_binary(raw);
  } else {
    ticks = parse_text(
        std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
  }
  return TimestampSeries(std::move(ticks), std::move(meta));
}

TimestampSeries parse_timestamps(std::string_view raw, TimestampFormat format,
                                 AcquisitionMeta meta) {
  return parse_timestamps(std::as_bytes(std::span(raw.data(), raw.size())), format,
                          std::move(meta));
}

std::string write_timestamps(const TimestampSeries& series, TimestampFormat format) {
  std::string out;
  if (format == TimestampFormat::binary_le64) {
    out.resize(series.size() * 8);
    std::size_t o = 0;
    for (Tick t : series.ticks()) {
      for (int b = 0; b < 8; ++b) out[o++] = static_cast<char>((t >> (8 * b)) & 0xFF);
    }
  } else {
    out.reserve(series.size() * 12);
    for (Tick t : series.ticks()) {
      out += std::to_string(t);
      out += '\n';
    }
  }
  return out;
}

InterArrivalSeries inter_arrivals(const TimestampSeries& series, bool dedup) {
  const auto ticks = series.ticks();
  std::vector<double> gaps;
  gaps.reserve(ticks.size());
  for (std::size_t k = 1; k < ticks.size(); ++k) {
    const Tick gap = ticks[k] - ticks[k - 1];
    if (gap == 0) {
      if (!dedup) {
        throw Error(ErrorKind::duplicate_tick,
                    "duplicate tick " + std::to_string(ticks[k]) + " at index " +
                        std::to_string(k));
      }
      continue;
    }
    gaps.push_back(static_cast<double>(gap));
  }
  if (gaps.empty()) {
    throw Error(ErrorKind::insufficient_data,
                "need at least 2 distinct ticks to form an interval");
  }
  return InterArrivalSeries(std::move(gaps), series.meta());
}

TimestampFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".bin" || ext == ".le64") return TimestampFormat::binary_le64;
  return TimestampFormat::text_lines;
}

std::filesystem::path sidecar_path(const std::filesystem::path& data_path) {
  auto p = data_path;
  p.replace_extension(".json");
  return p;
}

std::string meta_to_json(const AcquisitionMeta& meta) {
  nlohmann::ordered_json j;
  j["mode"] = meta.mode == AcquisitionMode::gated ? "gated" : "free_run";
  if (meta.gate_period_ns) {
    j["gate_period_ns"] = *meta.gate_period_ns;
  } else {
    j["gate_period_ns"] = nullptr;
  }
  j["dead_time_ns"] = meta.dead_time_ns;
  j["source_label"] = meta.source_label;
  return j.dump(2);
}

AcquisitionMeta meta_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("sidecar: ") + e.what(), e.byte);
  }
  AcquisitionMeta meta;
  try {
    const auto mode = j.value("mode", std::string("free_run"));
    if (mode == "gated") {
      meta.mode = AcquisitionMode::gated;
    } else if (mode != "free_run") {
      throw Error(ErrorKind::config, "sidecar: unknown mode '" + mode + "'");
    }
    if (j.contains("gate_period_ns") && !j["gate_period_ns"].is_null()) {
      meta.gate_period_ns = j["gate_period_ns"].get<std::uint64_t>();
    }
    meta.dead_time_ns = j.value("dead_time_ns", std::uint64_t{0});
    meta.source_label = j.value("source_label", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("sidecar: ") + e.what());
  }
  meta.validate();
  return meta;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::config, "write failed for " + path.string());
}

TimestampSeries load_timestamps(const std::filesystem::path& path,
                                std::optional<TimestampFormat> format) {
  AcquisitionMeta meta;
  const auto side = sidecar_path(path);
  if (side != path && std::filesystem::exists(side)) {
    meta = meta_from_json(read_file(side));
  }
  const auto raw = read_file(path);
  return parse_timestamps(std::string_view(raw), format.value_or(format_from_path(path)),
                          std::move(meta));
}

void save_timestamps(const std::filesystem::path& path, const TimestampSeries& series,
                     std::optional<TimestampFormat> format) {
  write_file(path, write_timestamps(series, format.value_or(format_from_path(path))));
}

}  // namespace sradiag
