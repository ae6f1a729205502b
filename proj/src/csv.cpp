#include "mdcs/csv.hpp"

#include <fstream>
#include <sstream>

#include "mdcs/errors.hpp"
#include "text_util.hpp"

namespace mdcs {

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

double to_double(const std::string& s, std::size_t row) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoFailure("csv: row " + std::to_string(row + 2) + ": '" + s + "' is not a number");
  }
}

void need_columns(const CsvTable& t, std::size_t n) {
  if (t.header.size() < n) throw IoFailure("csv: expected at least " + std::to_string(n) + " columns");
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    if (t.rows[r].size() < n) throw IoFailure("csv: row " + std::to_string(r + 2) + " is short");
}

}  // namespace

std::string format_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + quote(cells[i]);
    out += "\r\n";
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(cell);
      cell.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !cell.empty()) {
        rec.push_back(cell);
        records.push_back(rec);
      }
      rec.clear();
      cell.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw IoFailure("csv: unterminated quoted field");
  if (any || !cell.empty()) {
    rec.push_back(cell);
    records.push_back(rec);
  }
  if (records.empty()) throw IoFailure("csv: empty input");
  CsvTable t;
  t.header = records.front();
  t.rows.assign(records.begin() + 1, records.end());
  return t;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoFailure("write to '" + path + "' failed");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trace_to_csv(const Trace1D& trace) {
  CsvTable t;
  t.header = {"nu_t [THz]", "amplitude [arb]", "valid"};
  for (std::size_t i = 0; i < trace.size(); ++i)
    t.rows.push_back({detail::exact(trace.nu_thz[i]), detail::exact(trace.amplitude[i]),
                      (trace.valid.size() == trace.size() && !trace.valid[i]) ? "0" : "1"});
  return format_csv(t);
}

Trace1D trace_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  need_columns(t, 2);
  Trace1D out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.nu_thz.push_back(to_double(t.rows[r][0], r));
    out.amplitude.push_back(to_double(t.rows[r][1], r));
    out.valid.push_back(t.rows[r].size() > 2 && t.rows[r][2] == "0" ? 0 : 1);
  }
  return out;
}

std::string decay_to_csv(const DecayTrace& trace) {
  CsvTable t;
  t.header = {"t_plus_tau [ps]", "amplitude [arb]"};
  for (std::size_t i = 0; i < trace.size(); ++i)
    t.rows.push_back({detail::exact(trace.delay_ps[i]), detail::exact(trace.amplitude[i])});
  return format_csv(t);
}

DecayTrace decay_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  need_columns(t, 2);
  DecayTrace out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out.delay_ps.push_back(to_double(t.rows[r][0], r));
    out.amplitude.push_back(to_double(t.rows[r][1], r));
  }
  return out;
}

}  // namespace mdcs
