#include "fairmix/point.hpp"

#include <string>

#include "fairmix/errors.hpp"

namespace fairmix {

void require_same_dim(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) {
    throw StructuralError("dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
  }
}

}  // namespace fairmix
