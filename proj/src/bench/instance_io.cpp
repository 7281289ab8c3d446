#include "rankadapt/bench/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

#include "rankadapt/bench/csv.hpp"
#include "rankadapt/errors.hpp"

namespace rankadapt::bench {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json bound_json(const BoundValue& b) {
  json j{{"value", b.value}, {"is_rate", b.is_rate}};
  j["minimizer_k"] = b.minimizer_k ? json(*b.minimizer_k) : json(nullptr);
  return j;
}

// Runs one evaluator; a throwing evaluator reports its message instead.
void record(json& out, const std::string& key, const std::function<json()>& eval) {
  try {
    out[key] = eval();
  } catch (const std::exception& e) {
    out[key] = json{{"error", e.what()}};
  }
}

Vector sorted_vector(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw DomainError(std::string("bound inputs: '") + key + "' must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j[key]) {
    if (!x.is_number()) throw DomainError(std::string("bound inputs: '") + key + "' has a non-number");
    v.push_back(x.get<double>());
  }
  std::sort(v.begin(), v.end(), std::greater<>());
  return Eigen::Map<Vector>(v.data(), Index(v.size()));
}

template <class T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw DomainError(std::string("bound inputs: missing '") + key + "'");
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw DomainError(std::string("bound inputs: '") + key + "' has the wrong type");
  }
}

}  // namespace

void write_matrix_csv(const Matrix& M, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
      try {
        row.push_back(parse_double(field));
      } catch (const SchemaError& e) {
        throw DomainError(path.string() + ": " + e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DomainError(path.string() + ": ragged matrix rows");
    rows.push_back(std::move(row));
  }
  const Index cols = rows.empty() ? 0 : Index(rows.front().size());
  Matrix M(Index(rows.size()), cols);
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = rows[i][j];
  return M;
}

std::filesystem::path save_instance(const ProblemInstance& inst, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_matrix_csv(inst.A, dir / "A.csv");
  write_matrix_csv(inst.X, dir / "X.csv");
  write_matrix_csv(inst.Y, dir / "Y.csv");
  json meta{{"setting", std::string(to_string(inst.setting))},
            {"sigma", inst.sigma},
            {"seed", inst.seed},
            {"n", inst.n()},
            {"d_x", inst.d_x()},
            {"d_y", inst.d_y()},
            {"A", "A.csv"},
            {"X", "X.csv"},
            {"Y", "Y.csv"}};
  if (inst.covariance) {
    write_matrix_csv(*inst.covariance, dir / "covariance.csv");
    meta["covariance"] = "covariance.csv";
  }
  const auto path = dir / "instance.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << meta.dump(2) << '\n';
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "instance.json" : path;
  const auto dir = file.parent_path();
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError(file.string() + ": invalid JSON: " + e.what());
  }
  ProblemInstance inst;
  try {
    const auto setting = meta.at("setting").get<std::string>();
    if (setting == "regression") inst.setting = Setting::regression;
    else if (setting == "sysid") inst.setting = Setting::sysid;
    else throw DomainError(file.string() + ": unknown setting '" + setting + "'");
    inst.sigma = meta.at("sigma").get<double>();
    inst.seed = meta.value("seed", std::uint64_t{0});
    inst.A = read_matrix_csv(dir / meta.value("A", std::string("A.csv")));
    inst.X = read_matrix_csv(dir / meta.value("X", std::string("X.csv")));
    inst.Y = read_matrix_csv(dir / meta.value("Y", std::string("Y.csv")));
    if (meta.contains("covariance"))
      inst.covariance = read_matrix_csv(dir / meta["covariance"].get<std::string>());
  } catch (const json::exception& e) {
    throw DomainError(file.string() + ": " + e.what());
  }
  if (inst.X.rows() != inst.Y.rows() || inst.A.rows() != inst.Y.cols() ||
      inst.A.cols() != inst.X.cols())
    throw DomainError(file.string() + ": matrix shapes do not match Y = X A^T + E");
  return inst;
}

ProblemInstance generate_instance(const GenOptions& opt) {
  if (opt.setting == Setting::sysid) {
    const Matrix A = make_stable_symmetric({opt.d, opt.r, opt.b, SpectrumOffset::j_plus_1}, opt.seed);
    return simulate_lti(A, opt.n, opt.sigma, opt.seed);
  }
  const Matrix A = make_target({opt.d, opt.r, opt.b, SpectrumOffset::j}, opt.seed);
  Vector diag = Vector::Ones(opt.d);
  if (opt.j_squared_covariance)
    for (Index j = 0; j < opt.d; ++j) diag(j) = double((j + 1) * (j + 1));
  return sample_regression(A, diag.asDiagonal().toDenseMatrix(), opt.n, opt.sigma, opt.seed);
}

json report_to_json(const EstimateReport& rep, const std::string& method) {
  json A_hat = json::array();
  for (Index i = 0; i < rep.A_hat.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < rep.A_hat.cols(); ++j) row.push_back(rep.A_hat(i, j));
    A_hat.push_back(row);
  }
  return json{{"method", method},
              {"effective_rank", rep.effective_rank},
              {"threshold_used", optional_number(rep.threshold_used)},
              {"frob_error", optional_number(rep.frob_error)},
              {"relative_error", optional_number(rep.relative_error)},
              {"A_hat", A_hat}};
}

BoundInputs bound_inputs_from_json(const json& j) {
  if (!j.is_object()) throw DomainError("bound inputs must be a JSON object");
  BoundInputs in;
  in.n = required<std::uint64_t>(j, "n");
  in.delta = j.contains("delta") ? required<double>(j, "delta") : 0.05;
  in.sigma = required<double>(j, "sigma");
  in.d_x = required<Index>(j, "d_x");
  in.d_y = required<Index>(j, "d_y");
  in.r = required<Index>(j, "r");
  in.target_spectrum = sorted_vector(j, "target_spectrum");
  in.cov_spectrum = sorted_vector(j, "cov_spectrum");
  in.validate();
  return in;
}

json evaluate_bounds(const json& j) {
  const BoundInputs in = bound_inputs_from_json(j);
  json out{{"inputs",
            {{"n", in.n}, {"delta", in.delta}, {"sigma", in.sigma}, {"d_x", in.d_x},
             {"d_y", in.d_y}, {"r", in.r}}}};

  record(out, "gamma_delta", [&] { return bound_json(gamma_delta(in)); });
  record(out, "beta_delta", [&] { return bound_json(beta_delta(in)); });
  record(out, "rlse_upper", [&] { return json(rlse_upper(in)); });
  record(out, "tlse_upper", [&] { return bound_json(tlse_upper(in)); });

  json per_rank = json::array();
  for (Index k = 1; k <= in.r; ++k) {
    json row{{"k", k}};
    record(row, "err_reg", [&] { return json(err_reg(k, in)); });
    record(row, "err_lti", [&] { return json(err_lti(k, in)); });
    record(row, "pi_k_noise_bound", [&] { return json(pi_k_noise_bound(k, in)); });
    record(row, "tail", [&] { return json(spectral_tail(in.target_spectrum, k)); });
    per_rank.push_back(row);
  }
  out["per_rank"] = per_rank;
  record(out, "covariance_deviation_radius",
         [&] { return json(covariance_deviation_radius(in.d_x, in.n, in.delta)); });

  if (j.contains("epsilon")) {
    const double eps = j["epsilon"].get<double>();
    for (auto setting : {Setting::regression, Setting::sysid}) {
      const std::string s(to_string(setting));
      record(out, "sample_complexity_threshold_" + s,
             [&] { return json(sample_complexity_threshold(eps, setting)); });
      record(out, "sample_complexity_lb_" + s,
             [&] { return json(sample_complexity_lb(in, eps, setting)); });
      record(out, "theorem_full_lb_" + s,
             [&] { return bound_json(theorem_full_lb(in, eps, setting)); });
    }
  }
  if (j.contains("xi")) {
    const double xi = j["xi"].get<double>();
    record(out, "theorem1_bound", [&] { return bound_json(theorem1_bound(in.target_spectrum, xi, in.r)); });
  }
  if (j.contains("tau") && j.contains("z_op_norm")) {
    const double tau = j["tau"].get<double>();
    const double z = j["z_op_norm"].get<double>();
    record(out, "chatterjee_factor", [&] { return json(chatterjee_factor(tau)); });
    record(out, "chatterjee_bound",
           [&] { return json(chatterjee_bound(tau, z, in.target_spectrum.sum())); });
    if (j.contains("abar_spectrum")) {
      const Vector abar = sorted_vector(j, "abar_spectrum");
      record(out, "adaptive_denoise_bound",
             [&] { return bound_json(adaptive_denoise_bound(abar, in.target_spectrum, z, tau)); });
    }
  }
  return out;
}

}  // namespace rankadapt::bench
