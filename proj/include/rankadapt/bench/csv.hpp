#pragma once

// Published CSV artifacts. Headers are fixed per schema; floats use the
// shortest decimal that round-trips, NaN/inf print as nan/inf/-inf, and a
// missing optional value is an empty field. Lines end in LF.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rankadapt::bench {

enum class Schema { trials, summary, e1_bounds, e2_table, e5_bounds };

/// Exact header line (without newline) of a schema.
const std::vector<std::string>& schema_columns(Schema s);
std::string schema_header(Schema s);

/// Row does not fit the schema, or a file header differs from it.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrialRow {
  std::string experiment;
  std::string scenario;
  int trial = 0;
  std::string estimator;
  double rel_error = 0;
  double frob_error_sq = 0;
  /// Empty for a failed trial.
  std::optional<long> effective_rank;
  std::optional<double> threshold;

  bool operator==(const TrialRow&) const = default;
};

struct SummaryRow {
  std::string experiment;
  std::string scenario;
  std::string estimator;
  double mean_rel_error = 0;
  double std_rel_error = 0;
  double max_rel_error = 0;
  double mean_effective_rank = 0;

  bool operator==(const SummaryRow&) const = default;
};

struct E1Row {
  double tau = 0;
  double new_bound_mean = 0;
  double chatterjee_bound_mean = 0;

  bool operator==(const E1Row&) const = default;
};

/// Statistics of the per-scenario mean errors across all alignment shifts.
struct E2TableRow {
  std::string experiment;
  std::string estimator;
  double error_avg = 0;
  double error_std = 0;
  double error_max = 0;

  bool operator==(const E2TableRow&) const = default;
};

struct E5BoundRow {
  std::string sweep;  // "n" or "d"
  long n = 0;
  long d = 0;
  double mean_frob_error_sq = 0;
  double tlse_upper = 0;

  bool operator==(const E5BoundRow&) const = default;
};

using Record = std::vector<std::string>;

std::string format_double(double x);
double parse_double(const std::string& field);

Record to_record(const TrialRow& r);
Record to_record(const SummaryRow& r);
Record to_record(const E1Row& r);
Record to_record(const E2TableRow& r);
Record to_record(const E5BoundRow& r);

TrialRow trial_from_record(const Record& rec);
SummaryRow summary_from_record(const Record& rec);
E1Row e1_from_record(const Record& rec);
E2TableRow e2_from_record(const Record& rec);
E5BoundRow e5_from_record(const Record& rec);

/// Serializes header + rows. SchemaError when a row has the wrong width or a
/// field contains a comma, quote or newline.
std::string render_csv(Schema s, const std::vector<Record>& rows);

/// Writes render_csv output; IoError (with the path) on failure.
void emit_csv(Schema s, const std::vector<Record>& rows, const std::filesystem::path& path);

/// Parses text produced by render_csv. SchemaError on a header mismatch or a
/// ragged row.
std::vector<Record> parse_csv(Schema s, const std::string& text);
std::vector<Record> read_csv(Schema s, const std::filesystem::path& path);

template <class Row>
std::vector<Record> to_records(const std::vector<Row>& rows) {
  std::vector<Record> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(to_record(r));
  return out;
}

}  // namespace rankadapt::bench
