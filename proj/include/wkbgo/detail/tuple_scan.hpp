#pragma once

// Included from lattice.hpp.

#include <type_traits>

namespace wkbgo {

namespace detail {

template <class Visitor>
bool scan_level(const ModeSet& modes, std::size_t pos, std::size_t arity,
                std::vector<std::size_t>& idx, std::vector<Int>& sum, Int signed_norms,
                Visitor& visit) {
  const int d = modes.dim();
  if (pos == arity) {
    Int s2 = 0;
    for (Int c : sum) s2 += c * c;
    const WaveVector alt(sum);
    const Int defect = s2 - signed_norms;
    if constexpr (std::is_same_v<std::invoke_result_t<Visitor&, std::span<const std::size_t>,
                                                      Int, const WaveVector&>,
                                 bool>) {
      return visit(std::span<const std::size_t>(idx), defect, alt);
    } else {
      visit(std::span<const std::size_t>(idx), defect, alt);
      return true;
    }
  }
  const Int sign = pos % 2 == 0 ? 1 : -1;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const WaveVector& k = modes[i];
    idx[pos] = i;
    for (int a = 0; a < d; ++a) sum[static_cast<std::size_t>(a)] += sign * k[a];
    const bool more =
        scan_level(modes, pos + 1, arity, idx, sum, signed_norms + sign * k.norm2(), visit);
    for (int a = 0; a < d; ++a) sum[static_cast<std::size_t>(a)] -= sign * k[a];
    if (!more) return false;
  }
  return true;
}

}  // namespace detail

// Visitor(span<const size_t> indices, Int defect, const WaveVector& alternating_sum);
// returning false stops the scan.
template <class Visitor>
void for_each_tuple(const ModeSet& modes, Visitor&& visit) {
  if (modes.empty()) return;
  const std::size_t arity = 2 * static_cast<std::size_t>(modes.sigma()) + 1;
  std::vector<std::size_t> idx(arity, 0);
  std::vector<Int> sum(static_cast<std::size_t>(modes.dim()), 0);
  detail::scan_level(modes, 0, arity, idx, sum, 0, visit);
}

}  // namespace wkbgo
