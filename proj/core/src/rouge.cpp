#include "lgm/rouge.hpp"

#include <algorithm>

#include "lgm/nlp.hpp"
#include "lgm/text.hpp"

namespace lgm {

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  // Two rolling rows over the shorter sequence.
  const auto& outer = a.size() >= b.size() ? a : b;
  const auto& inner = a.size() >= b.size() ? b : a;
  std::vector<std::size_t> prev(inner.size() + 1, 0), cur(inner.size() + 1, 0);
  for (const auto& x : outer) {
    for (std::size_t j = 1; j <= inner.size(); ++j) {
      cur[j] = x == inner[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[inner.size()];
}

double rouge_l(const std::vector<std::string>& candidate, const std::vector<std::string>& reference) {
  auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0) return 0.0;
  double p = lcs / static_cast<double>(candidate.size());
  double r = lcs / static_cast<double>(reference.size());
  return 2 * p * r / (p + r);
}

std::vector<std::string> rouge_tokens(std::string_view text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  for (const auto& s : annotate(text)) {
    for (const auto& t : s.tokens) {
      if (t.pos != Pos::Punct) out.push_back(t.lemma);
    }
  }
  return out;
}

double rouge_l(std::string_view candidate, std::string_view reference) {
  return rouge_l(rouge_tokens(candidate), rouge_tokens(reference));
}

}  // namespace lgm
