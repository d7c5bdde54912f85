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

#include <array>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "vscreen/app.hpp"
#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/model.hpp"
#include "vscreen/rng.hpp"

namespace vscreen::app {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1) {
      throw Error("SHA-256 update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error("SHA-256 final failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

void write_manifest(const RunConfig& config, std::string_view command,
                    const std::vector<std::filesystem::path>& inputs) {
  nlohmann::ordered_json j;
  j["tool"] = "vscreen";
  j["version"] = std::string(kVersion);
  j["command"] = std::string(command);
  j["seed"] = config.seed;
  j["formats"] = {{"rng", Rng::kFormatVersion},
                  {"model", ml::kModelFormatVersion},
                  {"recipe", config.recipe.version}};
  j["config"] = nlohmann::ordered_json::parse(resolved_config_json(config));
  nlohmann::ordered_json in = nlohmann::ordered_json::array();
  for (const auto& p : inputs) {
    in.push_back({{"name", p.filename().string()},
                  {"bytes", std::filesystem::file_size(p)},
                  {"sha256", sha256_file(p)}});
  }
  j["inputs"] = std::move(in);
  write_text_file(config.out / fmt::format("manifest_{}.json", command), j.dump(2) + "\n");
}

}  // namespace vscreen::app
