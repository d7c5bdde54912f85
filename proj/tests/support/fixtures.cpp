/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "feature_oracle_table.hpp"

namespace vscreen::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  for (;;) {
    path_ = fs::temp_directory_path() / ("vscreen-" + tag + "-" + std::to_string(rd()));
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ScreenDataset make_dataset(const std::string& target,
                           const std::vector<std::pair<std::string, int>>& ligands,
                           const std::vector<std::vector<std::optional<double>>>& scores) {
  std::vector<ScoreRecord> records;
  for (std::size_t i = 0; i < ligands.size(); ++i) {
    records.push_back({target, ligands[i].first, ligands[i].second, scores[i]});
  }
  return ScreenDataset(target, default_scorer_specs(), std::move(records));
}

ScreenDataset oracle_dataset() {
  // the table lists scorers in default_scorer_specs() order
  std::vector<std::pair<std::string, int>> ligands;
  std::vector<std::vector<std::optional<double>>> scores;
  for (const auto& l : kOracleLigands) {
    ligands.emplace_back(std::string(l.id), l.label);
    scores.emplace_back(l.raw.begin(), l.raw.end());
  }
  return make_dataset("T", ligands, scores);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace vscreen::testing
