#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lgm {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Lowercases ASCII letters, trims, and collapses internal whitespace runs
/// to a single space. This is the canonical form of every concept key.
std::string normalize_lemma(std::string_view s);

/// Splits a lemma-form string into comparison tokens: whitespace separated,
/// with leading and trailing punctuation peeled off as standalone tokens
/// ("sweet." -> "sweet", "."; "[:" -> "[", ":"). Lowercased.
std::vector<std::string> lemma_tokens(std::string_view s);

std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Number of Unicode code points in a UTF-8 string. Budgets are measured in
/// characters, not bytes.
std::size_t utf8_length(std::string_view s);

bool is_punct_token(std::string_view tok);

/// Removes a surrounding ``` / ```json fence if the model wrapped its reply.
std::string_view strip_code_fence(std::string_view s);

}  // namespace lgm
