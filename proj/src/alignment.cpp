#include "harf/alignment.hpp"

#include <algorithm>

namespace harf {

Alignment align(const PhonemeSequence& reference,
                const PhonemeSequence& predicted) {
  const std::size_t n = reference.size();
  const std::size_t m = predicted.size();
  const std::size_t stride = m + 1;

  std::vector<std::size_t> cost((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& {
    return cost[i * stride + j];
  };

  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i) {
    at(i, 0) = i;
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t diag =
          at(i - 1, j - 1) + (reference[i - 1] == predicted[j - 1] ? 0 : 1);
      std::size_t del = at(i - 1, j) + 1;
      std::size_t ins = at(i, j - 1) + 1;
      at(i, j) = std::min({diag, del, ins});
    }
  }

  Alignment out;
  out.ops.reserve(std::max(n, m));
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && reference[i - 1] == predicted[j - 1] &&
        at(i, j) == at(i - 1, j - 1)) {
      out.ops.push_back({EditKind::kMatch, i - 1, j - 1});
      ++out.match_count;
      --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      out.ops.push_back({EditKind::kSubstitute, i - 1, j - 1});
      ++out.s_count;
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      out.ops.push_back({EditKind::kDelete, i - 1, std::nullopt});
      ++out.d_count;
      --i;
    } else {
      out.ops.push_back({EditKind::kInsert, std::nullopt, j - 1});
      ++out.i_count;
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

std::size_t lcs_length(const PhonemeSequence& a, const PhonemeSequence& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace harf
