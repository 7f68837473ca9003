/*
 * Copyright 2026 The forster Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include "io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

#include "forster/errors.hpp"

namespace forster::io {
namespace {

std::string_view Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double ParseDouble(std::string_view field, int line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || field.empty()) {
    throw Error(ErrorKind::kParseError, "line " + std::to_string(line) +
                                            ": bad number '" + std::string(field) + "'");
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PointSet ParsePointsCsv(const std::string& text, Labels labels) {
  std::vector<std::vector<std::string_view>> rows;
  std::vector<int> line_of;
  std::string_view rest(text);
  int line = 0;
  while (!rest.empty()) {
    ++line;
    const auto nl = rest.find('\n');
    const std::string_view raw = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    const std::string_view row = Trim(raw);
    if (row.empty()) continue;
    std::vector<std::string_view> fields;
    size_t pos = 0;
    for (;;) {
      const auto comma = row.find(',', pos);
      fields.push_back(Trim(row.substr(pos, comma - pos)));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && fields.size() != rows.front().size()) {
      throw Error(ErrorKind::kParseError, "line " + std::to_string(line) + ": ragged row");
    }
    rows.push_back(std::move(fields));
    line_of.push_back(line);
  }
  if (rows.empty()) throw Error(ErrorKind::kParseError, "no points");

  bool labeled = labels == Labels::kRequired;
  if (!labeled && rows.front().size() > 1) {
    bool all_signs = true;
    bool any_plus = false;
    for (const auto& r : rows) {
      all_signs = all_signs && (r.back() == "+1" || r.back() == "-1");
      any_plus = any_plus || r.back() == "+1";
    }
    labeled = all_signs && any_plus;
  }

  const int width = static_cast<int>(rows.front().size());
  const int d = labeled ? width - 1 : width;
  if (d < 1) throw Error(ErrorKind::kParseError, "no coordinate columns");
  Matrix points(static_cast<Eigen::Index>(rows.size()), d);
  std::vector<int> ys;
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      points(static_cast<Eigen::Index>(i), j) = ParseDouble(rows[i][j], line_of[i]);
    }
    if (labeled) {
      const double y = ParseDouble(rows[i].back(), line_of[i]);
      if (y != 1.0 && y != -1.0) {
        throw Error(ErrorKind::kParseError,
                    "line " + std::to_string(line_of[i]) + ": label must be +1 or -1");
      }
      ys.push_back(static_cast<int>(y));
    }
  }
  return labeled ? PointSet(std::move(points), std::move(ys)) : PointSet(std::move(points));
}

PointSet ParsePointsJson(const Json& doc) {
  try {
    const Matrix points = MatrixFromJson(doc.at("points"));
    if (doc.contains("d") && doc.at("d").get<int>() != points.cols()) {
      throw Error(ErrorKind::kParseError, "\"d\" disagrees with the point width");
    }
    if (doc.contains("labels")) {
      return PointSet(points, doc.at("labels").get<std::vector<int>>());
    }
    return PointSet(points);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
}

PointSet ReadPoints(const std::filesystem::path& path, Labels labels) {
  PointSet x = path.extension() == ".json" ? ParsePointsJson(ReadJson(path))
                                           : ParsePointsCsv(ReadText(path), labels);
  if (labels == Labels::kRequired && !x.labeled()) {
    throw Error(ErrorKind::kParseError, path.string() + " has no labels");
  }
  return x;
}

std::string FormatPointsCsv(const PointSet& x) {
  std::string out;
  for (int i = 0; i < x.n(); ++i) {
    for (int j = 0; j < x.d(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(x.points()(i, j));
    }
    if (x.labeled()) out += x.label(i) > 0 ? ",+1" : ",-1";
    out += '\n';
  }
  return out;
}

void WritePointsCsv(const std::filesystem::path& path, const PointSet& x) {
  WriteText(path, FormatPointsCsv(x));
}

Json ToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json ToJson(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(ToJson(Vector(m.row(i).transpose())));
  return out;
}

Vector VectorFromJson(const Json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Matrix MatrixFromJson(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::kParseError, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j.at(static_cast<size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorKind::kParseError, "ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<size_t>(c)).get<double>();
  }
  return m;
}

Json ModelToJson(const DecisionList& model) {
  Json stages = Json::array();
  for (const auto& stage : model.stages()) {
    stages.push_back({{"V_basis", ToJson(stage.embed())},
                      {"A", ToJson(stage.map().matrix())},
                      {"v", ToJson(stage.weight())},
                      {"threshold", stage.threshold()}});
  }
  return {{"ambient_d", model.ambient_d()}, {"stages", std::move(stages)}};
}

DecisionList ModelFromJson(const Json& j) {
  try {
    DecisionList model(j.at("ambient_d").get<int>());
    for (const auto& stage : j.at("stages")) {
      Matrix embed = MatrixFromJson(stage.at("V_basis"));
      if (embed.cols() != model.ambient_d()) {
        throw Error(ErrorKind::kParseError, "stage basis has the wrong width");
      }
      Subspace region(embed.transpose());
      model.Append(PartialClassifier(std::move(region), std::move(embed),
                                     Transform(MatrixFromJson(stage.at("A"))),
                                     VectorFromJson(stage.at("v")),
                                     stage.at("threshold").get<double>()));
    }
    return model;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kParseError, e.what());
  }
}

std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json ReadJson(const std::filesystem::path& path) {
  try {
    return Json::parse(ReadText(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path.string() + ": " + e.what());
  }
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kParseError, "cannot write " + path.string());
  out << text;
}

std::string Dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace forster::io
