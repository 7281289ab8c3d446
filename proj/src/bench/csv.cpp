#include "rankadapt/bench/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "rankadapt/errors.hpp"

namespace rankadapt::bench {

namespace {

void expect_width(const Record& rec, Schema s) {
  if (rec.size() != schema_columns(s).size())
    throw SchemaError("record has " + std::to_string(rec.size()) + " fields, schema " +
                      schema_header(s) + " has " + std::to_string(schema_columns(s).size()));
}

long parse_long(const std::string& field) {
  long v = 0;
  const auto* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end) throw SchemaError("not an integer: '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

const std::vector<std::string>& schema_columns(Schema s) {
  static const std::vector<std::string> trials{
      "experiment", "scenario", "trial", "estimator", "rel_error", "frob_error_sq",
      "effective_rank", "threshold"};
  static const std::vector<std::string> summary{
      "experiment", "scenario", "estimator", "mean_rel_error", "std_rel_error", "max_rel_error",
      "mean_effective_rank"};
  static const std::vector<std::string> e1{"tau", "new_bound_mean", "chatterjee_bound_mean"};
  static const std::vector<std::string> e2{"experiment", "estimator", "error_avg", "error_std",
                                           "error_max"};
  static const std::vector<std::string> e5{"sweep", "n", "d", "mean_frob_error_sq",
                                           "tlse_upper"};
  switch (s) {
    case Schema::trials: return trials;
    case Schema::summary: return summary;
    case Schema::e1_bounds: return e1;
    case Schema::e2_table: return e2;
    case Schema::e5_bounds: return e5;
  }
  return trials;
}

std::string schema_header(Schema s) {
  std::string out;
  for (const auto& c : schema_columns(s)) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

double parse_double(const std::string& field) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (field == "inf") return std::numeric_limits<double>::infinity();
  if (field == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const auto* end = field.data() + field.size();
  auto [p, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || p != end) throw SchemaError("not a number: '" + field + "'");
  return v;
}

Record to_record(const TrialRow& r) {
  return {r.experiment,
          r.scenario,
          std::to_string(r.trial),
          r.estimator,
          format_double(r.rel_error),
          format_double(r.frob_error_sq),
          r.effective_rank ? std::to_string(*r.effective_rank) : "",
          r.threshold ? format_double(*r.threshold) : ""};
}

Record to_record(const SummaryRow& r) {
  return {r.experiment, r.scenario, r.estimator, format_double(r.mean_rel_error),
          format_double(r.std_rel_error), format_double(r.max_rel_error),
          format_double(r.mean_effective_rank)};
}

Record to_record(const E1Row& r) {
  return {format_double(r.tau), format_double(r.new_bound_mean),
          format_double(r.chatterjee_bound_mean)};
}

Record to_record(const E2TableRow& r) {
  return {r.experiment, r.estimator, format_double(r.error_avg), format_double(r.error_std),
          format_double(r.error_max)};
}

Record to_record(const E5BoundRow& r) {
  return {r.sweep, std::to_string(r.n), std::to_string(r.d), format_double(r.mean_frob_error_sq),
          format_double(r.tlse_upper)};
}

TrialRow trial_from_record(const Record& rec) {
  expect_width(rec, Schema::trials);
  TrialRow r;
  r.experiment = rec[0];
  r.scenario = rec[1];
  r.trial = static_cast<int>(parse_long(rec[2]));
  r.estimator = rec[3];
  r.rel_error = parse_double(rec[4]);
  r.frob_error_sq = parse_double(rec[5]);
  if (!rec[6].empty()) r.effective_rank = parse_long(rec[6]);
  if (!rec[7].empty()) r.threshold = parse_double(rec[7]);
  return r;
}

SummaryRow summary_from_record(const Record& rec) {
  expect_width(rec, Schema::summary);
  return {rec[0], rec[1], rec[2], parse_double(rec[3]), parse_double(rec[4]),
          parse_double(rec[5]), parse_double(rec[6])};
}

E1Row e1_from_record(const Record& rec) {
  expect_width(rec, Schema::e1_bounds);
  return {parse_double(rec[0]), parse_double(rec[1]), parse_double(rec[2])};
}

E2TableRow e2_from_record(const Record& rec) {
  expect_width(rec, Schema::e2_table);
  return {rec[0], rec[1], parse_double(rec[2]), parse_double(rec[3]), parse_double(rec[4])};
}

E5BoundRow e5_from_record(const Record& rec) {
  expect_width(rec, Schema::e5_bounds);
  return {rec[0], parse_long(rec[1]), parse_long(rec[2]), parse_double(rec[3]),
          parse_double(rec[4])};
}

std::string render_csv(Schema s, const std::vector<Record>& rows) {
  std::string out = schema_header(s) + "\n";
  for (const auto& rec : rows) {
    expect_width(rec, s);
    for (std::size_t i = 0; i < rec.size(); ++i) {
      if (rec[i].find_first_of(",\"\n\r") != std::string::npos)
        throw SchemaError("field needs quoting, which the schema does not allow: '" + rec[i] + "'");
      if (i) out += ',';
      out += rec[i];
    }
    out += '\n';
  }
  return out;
}

void emit_csv(Schema s, const std::vector<Record>& rows, const std::filesystem::path& path) {
  const std::string text = render_csv(s, rows);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Record> parse_csv(Schema s, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV, expected header " + schema_header(s));
  if (line != schema_header(s))
    throw SchemaError("header '" + line + "' does not match '" + schema_header(s) + "'");
  std::vector<Record> rows;
  while (std::getline(in, line)) {
    auto rec = split(line);
    expect_width(rec, s);
    rows.push_back(std::move(rec));
  }
  return rows;
}

std::vector<Record> read_csv(Schema s, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(s, buf.str());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace rankadapt::bench
