// Copyright 2026 The Retroq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "retroq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double parse_double(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": cannot parse number '" + tok + "'");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(line);
  while (std::getline(is, tok, ',')) out.push_back(tok);
  return out;
}

complexd entry_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return complexd(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return complexd(j[0].get<double>(), j[1].get<double>());
  }
  throw ParseError(where + ": matrix entries must be numbers or [re, im]");
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError(where + ": expected a nonempty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) {
    throw ParseError(where + ": rows must be nonempty arrays");
  }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() ||
        static_cast<Eigen::Index>(j[r].size()) != cols) {
      throw ParseError(where + ": ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = entry_from_json(j[r][c], where);
    }
  }
  return m;
}

void write_record_csv(const std::string& path, const MeasurementRecord& rec) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  os << "t";
  for (Eigen::Index k = 0; k < rec.n_channels(); ++k) {
    os << ",dY_" << (k + 1);
  }
  os << "\n";
  for (Eigen::Index i = 0; i < rec.n_steps(); ++i) {
    os << fmt_double(static_cast<double>(i) * rec.dt);
    for (Eigen::Index k = 0; k < rec.n_channels(); ++k) {
      os << "," << fmt_double(rec.increments(k, i));
    }
    os << "\n";
  }
}

MeasurementRecord read_record_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open record '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) {
    throw ParseError(path + ": empty record file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") {
    throw ParseError(path + ": header must start with column 't'");
  }
  const auto nc = static_cast<Eigen::Index>(header.size()) - 1;
  if (nc < 1) throw ParseError(path + ": no dY columns in header");
  for (Eigen::Index k = 0; k < nc; ++k) {
    const std::string expect = "dY_" + std::to_string(k + 1);
    if (header[k + 1] != expect) {
      throw ParseError(path + ": expected header column '" + expect +
                       "', got '" + header[k + 1] + "'");
    }
  }

  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto toks = split_csv_line(line);
    if (static_cast<Eigen::Index>(toks.size()) != nc + 1) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected " + std::to_string(nc + 1) + " columns");
    }
    const std::string where = path + ":" + std::to_string(lineno);
    times.push_back(parse_double(toks[0], where));
    std::vector<double> row;
    for (Eigen::Index k = 0; k < nc; ++k) {
      row.push_back(parse_double(toks[k + 1], where));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": record has no rows");
  if (std::abs(times[0]) > 1e-12) {
    throw ParseError(path + ": first increment must start at t=0");
  }
  double dt = 0.0;
  if (times.size() == 1) {
    throw ParseError(path + ": cannot infer dt from a single row");
  }
  dt = times[1] - times[0];
  if (!(dt > 0.0)) throw ParseError(path + ": time column must increase");
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double expect = static_cast<double>(i) * dt;
    if (std::abs(times[i] - expect) > 1e-9 * std::max(1.0, expect)) {
      throw ParseError(path + ": time grid is not uniform at row " +
                       std::to_string(i + 1));
    }
  }

  MeasurementRecord rec;
  rec.dt = dt;
  rec.increments.resize(nc, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index k = 0; k < nc; ++k) {
      rec.increments(k, static_cast<Eigen::Index>(i)) = rows[i][k];
    }
  }
  return rec;
}

void write_outcomes_json(const std::string& path,
                         const std::vector<double>& taus,
                         const std::vector<std::string>& labels) {
  json j;
  j["taus"] = taus;
  j["intervention_outcomes"] = labels;
  write_json(path, j);
}

std::vector<std::string> read_outcomes_json(const std::string& path) {
  const json j = read_json(path, "outcomes file");
  if (!j.contains("intervention_outcomes") ||
      !j["intervention_outcomes"].is_array()) {
    throw ParseError(path + ": missing intervention_outcomes array");
  }
  std::vector<std::string> out;
  for (const auto& v : j["intervention_outcomes"]) {
    if (!v.is_string()) {
      throw ParseError(path + ": outcome labels must be strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

void write_expectations_csv(const std::string& path,
                            const std::vector<std::string>& names,
                            double dt,
                            const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  os << "t";
  for (const auto& n : names) os << "," << n;
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << fmt_double(static_cast<double>(i) * dt);
    for (double v : rows[i]) os << "," << fmt_double(v);
    os << "\n";
  }
}

json retrodiction_to_json(const RetrodictionResult& result) {
  json j;
  j["taus"] = result.taus;
  j["outcome_labels"] = result.outcome_labels;
  j["probabilities"] = result.probabilities;
  j["normalizer"] = result.normalizer;
  j["log_scale"] = result.log_scale;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
}

json read_json(const std::string& path, const std::string& what) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + what + " '" + path + "'");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace retroq
