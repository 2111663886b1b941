// Copyright 2026 The adgen Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace adgen::generation {

/// An environment description for one product category.
struct Prompt {
  std::string prompt_id;
  std::string category;
  std::string text;
};

/// Category -> ordered prompts. Prompt ids are unique across the pool.
class PromptPool {
 public:
  /// Throws Error(kInvalidArgument) on a duplicate id or empty text.
  void add(Prompt prompt);

  /// Throws Error(kNotFound) for an unknown category.
  const std::vector<Prompt>& for_category(const std::string& category) const;
  /// Throws Error(kNotFound).
  const Prompt& by_id(const std::string& prompt_id) const;
  bool contains(const std::string& prompt_id) const;
  std::vector<std::string> categories() const;
  std::size_t size() const { return by_id_.size(); }

  /// Every listed category must have at least `min_prompts` prompts.
  void validate(const std::vector<std::string>& catalog, std::size_t min_prompts = 1) const;

 private:
  std::map<std::string, std::vector<Prompt>> by_category_;
  std::map<std::string, std::pair<std::string, std::size_t>> by_id_;
};

/// {"categories": {"apparel": [{"id": "...", "text": "..."}, ...], ...}}
PromptPool prompt_pool_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PromptPool& pool);

/// Three prompts for each default catalog category.
PromptPool default_prompt_pool();

}  // namespace adgen::generation
