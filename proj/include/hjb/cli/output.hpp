#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace hjb::cli {

// Shortest representation that parses back to the same double; "nan", "inf", "-inf".
std::string format_double(double x);

// Comma-separated, '.' decimal, '\n' line ends, header row first.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(std::size_t x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& s);
  CsvWriter& empty();
  void end_row();
  void close();

private:
  void separator();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

struct Metric {
  std::string name;
  std::string text;
  std::optional<double> value;
};

struct RunSummary {
  std::string command;
  int exit_code = 0;
  std::string error;
  std::vector<Metric> metrics;
  std::vector<std::string> failed_checks;
  std::vector<std::string> artifacts; // relative to the output directory

  bool ok() const { return exit_code == 0; }
  void metric(const std::string& name, double value);
  void metric(const std::string& name, long long value);
  void metric(const std::string& name, int value) { metric(name, static_cast<long long>(value)); }
  void metric(const std::string& name, std::size_t value) {
    metric(name, static_cast<long long>(value));
  }
  void text(const std::string& name, const std::string& value);
  // Records check.<name>=pass|fail; a failure raises the exit code to 3.
  bool check(const std::string& name, bool pass);

  std::optional<double> value(const std::string& name) const;
  const Metric* find(const std::string& name) const;
  bool check_passed(const std::string& name) const;
};

// summary.txt: one key=value per line, status first.
void write_summary(const std::filesystem::path& path, const RunSummary& summary);

} // namespace hjb::cli
