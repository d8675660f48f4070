#include "somchange/matrix.hpp"

#include <cmath>

#include "somchange/error.hpp"

namespace somchange {

void Matrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    fail(ErrorKind::DimensionMismatch, "row has " + std::to_string(values.size()) +
                                           " values, matrix has " + std::to_string(cols_) +
                                           " columns");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    sum += d * d;
  }
  return sum;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace somchange
