#pragma once

// Plot-ready per-round CSV.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gaepoison/core/error.hpp"
#include "gaepoison/fl/federation.hpp"

namespace gaepoison::analysis {

inline constexpr std::string_view kMetricsHeader =
    "round,participant_id,role,local_accuracy,distance_to_global,lambda,global_accuracy,global_loss";

struct MetricsRow {
  int round = 0;
  long participant_id = 0;  // -1 for the global row
  std::string role;         // benign | attacker | global
  double local_accuracy = 0.0;
  double distance_to_global = 0.0;
  double lambda = 0.0;
  double global_accuracy = 0.0;
  double global_loss = 0.0;

  bool operator==(const MetricsRow&) const = default;
};

/// One row per participant (benign first, then attackers) and one global row per round.
/// Benign and global rows carry the first attacker's lambda, or 0 without an attacker.
inline std::vector<MetricsRow> metrics_rows(const std::vector<fl::RoundRecord>& records) {
  std::vector<MetricsRow> rows;
  for (const auto& r : records) {
    const std::size_t J = r.n_benign();
    const std::size_t n = J + r.malicious_models.size();
    for (std::size_t i = 0; i < n; ++i) {
      MetricsRow m;
      m.round = r.round;
      m.participant_id = static_cast<long>(i);
      m.role = i < J ? "benign" : "attacker";
      m.local_accuracy = i < r.local_accuracies.size() ? r.local_accuracies[i] : 0.0;
      m.distance_to_global = r.distances.at(i);
      m.lambda = i < J ? r.lambda() : r.lambdas.at(i - J);
      m.global_accuracy = r.global_accuracy;
      m.global_loss = r.global_loss;
      rows.push_back(std::move(m));
    }
    MetricsRow g;
    g.round = r.round;
    g.participant_id = -1;
    g.role = "global";
    g.local_accuracy = r.global_accuracy;
    g.distance_to_global = 0.0;
    g.lambda = r.lambda();
    g.global_accuracy = r.global_accuracy;
    g.global_loss = r.global_loss;
    rows.push_back(std::move(g));
  }
  return rows;
}

/// Shortest text of 17 significant digits, "%.17g" style.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);  // shortest round-trip form
  if (res.ec != std::errc{}) throw numeric_error("cannot format value");
  return std::string(buf, res.ptr);
}

inline std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out(kMetricsHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.round) + ',' + std::to_string(r.participant_id) + ',' + r.role + ',' +
           format_real(r.local_accuracy) + ',' + format_real(r.distance_to_global) + ',' + format_real(r.lambda) + ',' +
           format_real(r.global_accuracy) + ',' + format_real(r.global_loss) + '\n';
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw io_error("cannot open " + path.string() + " for writing");
  f << text;
  f.close();
  if (!f) throw io_error("failed writing " + path.string());
}

inline void emit_metrics(const std::vector<fl::RoundRecord>& records, const std::filesystem::path& out_path) {
  if (records.empty()) throw contract_error("no round records to emit");
  write_text_file(out_path, metrics_csv(metrics_rows(records)));
}

namespace metrics_detail {

template <class T>
T parse_field(std::string_view s, const std::string& where) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw format_error("bad field '" + std::string(s) + "' at " + where);
  return v;
}

}  // namespace metrics_detail

inline std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line) || line != kMetricsHeader) throw format_error(path.string() + ": unexpected metrics header");
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      fields.push_back(rest.substr(0, pos));
    fields.push_back(rest);
    if (fields.size() != 8) throw format_error("expected 8 fields at " + where);
    using metrics_detail::parse_field;
    MetricsRow r;
    r.round = parse_field<int>(fields[0], where);
    r.participant_id = parse_field<long>(fields[1], where);
    r.role = std::string(fields[2]);
    r.local_accuracy = parse_field<double>(fields[3], where);
    r.distance_to_global = parse_field<double>(fields[4], where);
    r.lambda = parse_field<double>(fields[5], where);
    r.global_accuracy = parse_field<double>(fields[6], where);
    r.global_loss = parse_field<double>(fields[7], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gaepoison::analysis
