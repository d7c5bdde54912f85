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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vscreen {

// Minimal comma-separated text support. Fields may be double-quoted; a
// doubled quote inside a quoted field is a literal quote. Embedded newlines
// are not supported.

std::vector<std::string> split_csv_line(std::string_view line);

std::string csv_field(std::string_view value);

std::string join_csv(const std::vector<std::string>& fields);

/// Reads a whole text file into lines (LF or CRLF), dropping a trailing
/// empty line. Throws DataError naming the path if it cannot be opened.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes `content` to `path`, creating parent directories. Throws
/// DataError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace vscreen
