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

#include <optional>
#include <string>
#include <string_view>

namespace vscreen {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

/// Locale-independent parse of a finite real. Accepts an optional leading
/// sign and scientific notation; surrounding blanks are ignored. Returns
/// nullopt for anything else, including inf/nan.
std::optional<double> parse_real(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace vscreen
