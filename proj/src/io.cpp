#include "prte/io.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace prte::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& field, const std::string& name,
                    size_t line_no) {
  try {
    size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw IngestError(name + ": line " + std::to_string(line_no) +
                      ": cannot parse numeric field '" + field + "'");
  }
}

}  // namespace

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError(path + ": cannot open for reading");
  return ingest_csv(in, path);
}

Dataset ingest_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError(name + ": empty file");
  const auto header = split_csv(line);
  int y_col = -1, s_col = -1;
  std::vector<int> x_cols, z_cols;
  for (size_t c = 0; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h == "y") {
      y_col = static_cast<int>(c);
    } else if (h == "s") {
      s_col = static_cast<int>(c);
    } else if (h.size() > 1 && h[0] == 'x') {
      x_cols.push_back(static_cast<int>(c));
    } else if (h.size() > 1 && h[0] == 'z') {
      z_cols.push_back(static_cast<int>(c));
    } else {
      throw IngestError(name + ": line 1: unknown column '" + h + "'");
    }
  }
  if (y_col < 0) throw IngestError(name + ": line 1: missing column 'y'");
  if (s_col < 0) throw IngestError(name + ": line 1: missing column 's'");
  if (x_cols.empty()) throw IngestError(name + ": line 1: no x columns");
  if (z_cols.empty()) throw IngestError(name + ": line 1: no z columns");

  std::vector<std::vector<double>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw IngestError(name + ": line " + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (size_t c = 0; c < fields.size(); ++c) {
      row[c] = parse_number(fields[c], name, line_no);
    }
    const double s = row[static_cast<size_t>(s_col)];
    if (s != 0.0 && s != 1.0) {
      throw IngestError(name + ": line " + std::to_string(line_no) +
                        ": s must be 0 or 1, found " +
                        fields[static_cast<size_t>(s_col)]);
    }
    rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n < 2) throw IngestError(name + ": need at least 2 data rows");
  Dataset d;
  d.y.resize(n);
  d.s.resize(n);
  d.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  d.z.resize(n, static_cast<Eigen::Index>(z_cols.size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    d.y[i] = row[static_cast<size_t>(y_col)];
    d.s[i] = row[static_cast<size_t>(s_col)];
    for (size_t k = 0; k < x_cols.size(); ++k) {
      d.x(i, static_cast<Eigen::Index>(k)) =
          row[static_cast<size_t>(x_cols[k])];
    }
    for (size_t k = 0; k < z_cols.size(); ++k) {
      d.z(i, static_cast<Eigen::Index>(k)) =
          row[static_cast<size_t>(z_cols[k])];
    }
  }
  d.validate();
  return d;
}

void emit_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError(path + ": cannot open for writing");
  out.precision(17);
  out << "y,s";
  for (Eigen::Index k = 0; k < data.x.cols(); ++k) out << ",x" << (k + 1);
  for (Eigen::Index k = 0; k < data.z.cols(); ++k) out << ",z" << (k + 1);
  out << "\n";
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.y[i] << "," << data.s[i];
    for (Eigen::Index k = 0; k < data.x.cols(); ++k) out << "," << data.x(i, k);
    for (Eigen::Index k = 0; k < data.z.cols(); ++k) out << "," << data.z(i, k);
    out << "\n";
  }
  if (!out) throw IngestError(path + ": write failed");
}

namespace {

nlohmann::json to_json(const EstimateResult& r) {
  nlohmann::json j;
  j["prte_hat"] = r.prte_hat;
  j["se"] = r.se;
  j["ci_lo"] = r.ci_lo;
  j["ci_hi"] = r.ci_hi;
  j["theta1"] = std::vector<double>(r.theta.theta1.begin(),
                                    r.theta.theta1.end());
  j["theta2"] = std::vector<double>(r.theta.theta2.begin(),
                                    r.theta.theta2.end());
  j["theta3"] = r.theta.theta3;
  j["diagnostics"] = {{"empty_neighborhood", r.diagnostics.empty_neighborhood},
                      {"ratio_fallback", r.diagnostics.ratio_fallback},
                      {"propensity_clamp", r.diagnostics.propensity_clamp},
                      {"kappa_fallback", r.diagnostics.kappa_fallback},
                      {"eq_residual", r.diagnostics.eq_residual}};
  return j;
}

nlohmann::json to_json(const MCReport& r) {
  return nlohmann::json{{"n", r.n},
                        {"L", r.L},
                        {"replications", r.replications},
                        {"true_prte", r.true_prte},
                        {"mean", r.mean},
                        {"bias", r.bias},
                        {"rmse", r.rmse},
                        {"coverage", r.coverage},
                        {"failures", r.failures},
                        {"wall_time", r.wall_seconds}};
}

template <class R>
void emit_any(const R& r, const std::string& format, const std::string& path) {
  auto write = [&](std::ostream& out) {
    if (format == "json") {
      emit_json(r, out);
    } else if (format == "csv") {
      emit_csv(r, out);
    } else {
      throw std::invalid_argument("emit_report: unknown format '" + format +
                                  "'");
    }
  };
  if (path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IngestError(path + ": cannot open for writing");
  write(out);
  if (!out) throw IngestError(path + ": write failed");
}

}  // namespace

void emit_json(const EstimateResult& r, std::ostream& out) {
  out << to_json(r).dump(2) << "\n";
}

void emit_json(const MCReport& r, std::ostream& out) {
  out << to_json(r).dump(2) << "\n";
}

void emit_csv(const EstimateResult& r, std::ostream& out) {
  out.precision(17);
  out << "prte_hat,se,ci_lo,ci_hi\n"
      << r.prte_hat << "," << r.se << "," << r.ci_lo << "," << r.ci_hi << "\n";
}

void emit_csv(const MCReport& r, std::ostream& out) {
  out.precision(17);
  out << "n,L,true,mean,bias,rmse,coverage\n"
      << r.n << "," << r.L << "," << r.true_prte << "," << r.mean << ","
      << r.bias << "," << r.rmse << "," << r.coverage << "\n";
}

void emit_report(const EstimateResult& r, const std::string& format,
                 const std::string& path) {
  emit_any(r, format, path);
}

void emit_report(const MCReport& r, const std::string& format,
                 const std::string& path) {
  emit_any(r, format, path);
}

}  // namespace prte::io
