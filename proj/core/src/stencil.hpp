#pragma once

// Internal helpers shared by the grid operators: periodic neighbour tables,
// the 3x3 stencil sweep and compile-time dispatch on the ambient dimension.

#include <cstddef>
#include <type_traits>
#include <vector>

#include "hmflow/fields.hpp"

namespace hmflow::detail {

inline constexpr std::size_t kMaxDim = 16;

struct Wrap {
  std::vector<std::size_t> prev;
  std::vector<std::size_t> next;

  explicit Wrap(std::size_t n) : prev(n), next(n) {
    for (std::size_t k = 0; k < n; ++k) {
      prev[k] = (k + n - 1) % n;
      next[k] = (k + 1) % n;
    }
  }
};

/// Pointers to the nine nodes around (i, j); n/s are rows i+1/i-1 (y
/// direction), e/w are columns j+1/j-1 (x direction).
struct Stencil {
  const double* c;
  const double* e;
  const double* w;
  const double* n;
  const double* s;
  const double* ne;
  const double* nw;
  const double* se;
  const double* sw;
};

template <typename Fn>
void for_each_stencil(const VectorField& u, Fn&& fn) {
  const GridShape& g = u.shape();
  const std::size_t dim = u.dim();
  const std::size_t stride = g.cols * dim;
  const Wrap rows(g.rows);
  const Wrap cols(g.cols);
  const double* base = u.data().data();
  for (std::size_t i = 0; i < g.rows; ++i) {
    const double* rc = base + i * stride;
    const double* rn = base + rows.next[i] * stride;
    const double* rs = base + rows.prev[i] * stride;
    for (std::size_t j = 0; j < g.cols; ++j) {
      const std::size_t je = cols.next[j] * dim;
      const std::size_t jw = cols.prev[j] * dim;
      const std::size_t jc = j * dim;
      fn(i * g.cols + j, Stencil{rc + jc, rc + je, rc + jw, rn + jc, rs + jc,
                                 rn + je, rn + jw, rs + je, rs + jw});
    }
  }
}

/// Calls fn with std::integral_constant<size_t, K> for the common target
/// dimensions and with K = 0 (meaning "use the runtime value") otherwise.
template <typename Fn>
void dispatch_dim(std::size_t dim, Fn&& fn) {
  switch (dim) {
    case 1:
      fn(std::integral_constant<std::size_t, 1>{});
      return;
    case 3:
      fn(std::integral_constant<std::size_t, 3>{});
      return;
    case 4:
      fn(std::integral_constant<std::size_t, 4>{});
      return;
    default:
      fn(std::integral_constant<std::size_t, 0>{});
      return;
  }
}

}  // namespace hmflow::detail
