#include "hjb/cli/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hjb::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (const auto& h : header) cell(h);
  end_row();
}

void CsvWriter::separator() {
  if (in_row_ > 0) out_.put(',');
  ++in_row_;
}

CsvWriter& CsvWriter::cell(double x) {
  separator();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  separator();
  out_ << s;
  return *this;
}

CsvWriter& CsvWriter::empty() {
  separator();
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error(path_.string() + ": row has " + std::to_string(in_row_) +
                           " cells, header has " + std::to_string(columns_));
  }
  out_.put('\n');
  in_row_ = 0;
}

void CsvWriter::close() {
  out_.close();
  if (!out_) throw std::runtime_error("failed writing " + path_.string());
}

void RunSummary::metric(const std::string& name, double value) {
  metrics.push_back({name, format_double(value), value});
}

void RunSummary::metric(const std::string& name, long long value) {
  metrics.push_back({name, std::to_string(value), static_cast<double>(value)});
}

void RunSummary::text(const std::string& name, const std::string& value) {
  metrics.push_back({name, value, std::nullopt});
}

bool RunSummary::check(const std::string& name, bool pass) {
  metrics.push_back({"check." + name, pass ? "pass" : "fail", pass ? 1.0 : 0.0});
  if (!pass) {
    failed_checks.push_back(name);
    if (exit_code < 3) exit_code = 3;
  }
  return pass;
}

const Metric* RunSummary::find(const std::string& name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::optional<double> RunSummary::value(const std::string& name) const {
  const Metric* m = find(name);
  return m ? m->value : std::nullopt;
}

bool RunSummary::check_passed(const std::string& name) const {
  const Metric* m = find("check." + name);
  return m && m->text == "pass";
}

void write_summary(const std::filesystem::path& path, const RunSummary& s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "status=" << (s.ok() ? "ok" : "failed") << '\n';
  out << "command=" << s.command << '\n';
  out << "exit_code=" << s.exit_code << '\n';
  if (!s.error.empty()) {
    std::string flat = s.error;
    for (char& c : flat) {
      if (c == '\n' || c == '\r') c = ' ';
    }
    out << "error=" << flat << '\n';
  }
  for (const auto& m : s.metrics) out << m.name << '=' << m.text << '\n';
  for (const auto& a : s.artifacts) out << "artifact=" << a << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

} // namespace hjb::cli
