#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lgm {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// ROUGE-L F1 over token sequences; 0 when either side is empty or nothing
/// is shared. Symmetric in its arguments.
double rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);

/// Lemma tokens of free text with punctuation dropped ("Apples are sweet." ->
/// apple be sweet).
std::vector<std::string> rouge_tokens(std::string_view text);

/// ROUGE-L F1 between the lemma tokens of two texts.
double rouge_l(std::string_view candidate, std::string_view reference);

}  // namespace lgm
