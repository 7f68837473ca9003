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


#ifndef FORSTER_TOOLS_IO_HPP_
#define FORSTER_TOOLS_IO_HPP_

#include <filesystem>
#include <string>

#include <json.hpp>

#include "forster/learner.hpp"
#include "forster/linalg.hpp"

namespace forster::io {

using Json = nlohmann::ordered_json;

enum class Labels { kAuto, kRequired };

// CSV: one point per row, no header, optional trailing label column. Labels
// are written as "+1"/"-1" and coordinates never carry a leading '+', so under
// kAuto a file is labeled when every row ends in +1 or -1 and some row ends
// in "+1". JSON: {"d": ..., "points": [[...]], "labels": [...]}, chosen by a
// .json extension.
PointSet ReadPoints(const std::filesystem::path& path, Labels labels = Labels::kAuto);
void WritePointsCsv(const std::filesystem::path& path, const PointSet& x);
std::string FormatPointsCsv(const PointSet& x);

PointSet ParsePointsCsv(const std::string& text, Labels labels);
PointSet ParsePointsJson(const Json& doc);

Json ToJson(const Vector& v);
Json ToJson(const Matrix& m);  // Row-major nested arrays.
Vector VectorFromJson(const Json& j);
Matrix MatrixFromJson(const Json& j);

Json ModelToJson(const DecisionList& model);
DecisionList ModelFromJson(const Json& j);

Json ReadJson(const std::filesystem::path& path);
std::string ReadText(const std::filesystem::path& path);
void WriteText(const std::filesystem::path& path, const std::string& text);

// Pretty-printed with a trailing newline. Doubles use the shortest
// representation that round-trips, which never exceeds 17 digits.
std::string Dump(const Json& j);

}  // namespace forster::io

#endif  // FORSTER_TOOLS_IO_HPP_
