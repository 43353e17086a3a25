#include "bregpower/matrix.hpp"

#include "bregpower/errors.hpp"

namespace bregpower {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeMismatch("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

}  // namespace bregpower
