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

#include "adgen/generation/prompt.hpp"

#include "adgen/common/error.hpp"

namespace adgen::generation {

void PromptPool::add(Prompt prompt) {
  if (prompt.prompt_id.empty() || prompt.prompt_id.find('/') != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "prompt id must be non-empty and free of '/'");
  }
  if (prompt.text.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt " + prompt.prompt_id + " has no text");
  if (prompt.category.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt " + prompt.prompt_id + " has no category");
  if (by_id_.count(prompt.prompt_id)) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate prompt id " + prompt.prompt_id);
  }
  auto& list = by_category_[prompt.category];
  by_id_[prompt.prompt_id] = {prompt.category, list.size()};
  list.push_back(std::move(prompt));
}

const std::vector<Prompt>& PromptPool::for_category(const std::string& category) const {
  auto it = by_category_.find(category);
  if (it == by_category_.end()) throw Error(ErrorCode::kNotFound, "no prompts for category " + category);
  return it->second;
}

const Prompt& PromptPool::by_id(const std::string& prompt_id) const {
  auto it = by_id_.find(prompt_id);
  if (it == by_id_.end()) throw Error(ErrorCode::kNotFound, "unknown prompt " + prompt_id);
  return by_category_.at(it->second.first)[it->second.second];
}

bool PromptPool::contains(const std::string& prompt_id) const { return by_id_.count(prompt_id) > 0; }

std::vector<std::string> PromptPool::categories() const {
  std::vector<std::string> out;
  for (const auto& [cat, list] : by_category_) out.push_back(cat);
  return out;
}

void PromptPool::validate(const std::vector<std::string>& catalog, std::size_t min_prompts) const {
  for (const auto& cat : catalog) {
    auto it = by_category_.find(cat);
    const std::size_t n = it == by_category_.end() ? 0 : it->second.size();
    if (n < min_prompts) {
      throw Error(ErrorCode::kInvalidArgument, "category " + cat + " has " + std::to_string(n) +
                                                   " prompts, need " + std::to_string(min_prompts));
    }
  }
}

PromptPool prompt_pool_from_json(const nlohmann::json& j) {
  PromptPool pool;
  try {
    for (const auto& [cat, list] : j.at("categories").items()) {
      for (const auto& p : list) pool.add({p.at("id").get<std::string>(), cat, p.at("text").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("prompt pool: ") + e.what());
  }
  return pool;
}

nlohmann::json to_json(const PromptPool& pool) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& cat : pool.categories()) {
    auto& arr = cats[cat] = nlohmann::json::array();
    for (const auto& p : pool.for_category(cat)) arr.push_back({{"id", p.prompt_id}, {"text", p.text}});
  }
  return {{"categories", cats}};
}

PromptPool default_prompt_pool() {
  PromptPool pool;
  const std::pair<const char*, const char*> prompts[][3] = {
      {{"apparel-studio", "a bright minimalist photo studio with soft daylight and a pale backdrop"},
       {"apparel-street", "a sunny city street with blurred storefronts and warm afternoon light"},
       {"apparel-nature", "a calm meadow at golden hour with soft green bokeh"}},
      {{"footwear-track", "an outdoor running track at dawn with long shadows"},
       {"footwear-concrete", "a polished concrete floor in an industrial loft"},
       {"footwear-trail", "a forest trail with moss, stones and dappled light"}},
      {{"accessories-marble", "a white marble tabletop with subtle reflections"},
       {"accessories-velvet", "a deep blue velvet surface with a soft spotlight"},
       {"accessories-wood", "a rustic oak table beside a sunlit window"}},
      {{"home-livingroom", "a cozy scandinavian living room with natural textures"},
       {"home-kitchen", "a modern kitchen counter with morning light"},
       {"home-garden", "a sheltered garden patio with potted plants"}},
  };
  const char* categories[] = {"apparel", "footwear", "accessories", "home"};
  for (std::size_t c = 0; c < 4; ++c)
    for (const auto& [id, text] : prompts[c]) pool.add({id, categories[c], text});
  return pool;
}

}  // namespace adgen::generation
