#pragma once

#include <string>

#include "json.hpp"

#include "lge/solution.hpp"

namespace lge {

nlohmann::json to_json(const Solution& solution);
Solution solution_from_json(const nlohmann::json& doc);

void save_solution(const std::string& path, const Solution& solution);
Solution load_solution(const std::string& path);

// word -> code, read from either a solution file (first code of each word)
// or "word<TAB>code[<TAB>...]" lines such as the lexicon listing.
std::map<std::string, CategoryCode> load_seed_lexicon(const std::string& path,
                                                      const AlgebraConfig& algebra);

}  // namespace lge
