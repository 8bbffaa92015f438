#pragma once

#include <Eigen/Dense>
#include <vector>

namespace capillary {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense 3-tensor of small dimension, stored row-major.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int d) : d_(d), v_(static_cast<size_t>(d) * d * d, 0.0) {}

  int dim() const { return d_; }
  double& operator()(int i, int j, int k) { return v_[(static_cast<size_t>(i) * d_ + j) * d_ + k]; }
  double operator()(int i, int j, int k) const { return v_[(static_cast<size_t>(i) * d_ + j) * d_ + k]; }

  double apply(const Vec& a, const Vec& b, const Vec& c) const {
    double s = 0.0;
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        for (int k = 0; k < d_; ++k) s += (*this)(i, j, k) * a[i] * b[j] * c[k];
    return s;
  }

  // T(a, b, .) as a vector.
  Vec contract2(const Vec& a, const Vec& b) const {
    Vec r = Vec::Zero(d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        for (int k = 0; k < d_; ++k) r[k] += (*this)(i, j, k) * a[i] * b[j];
    return r;
  }

  // T(a, ., .) as a matrix.
  Mat contract1(const Vec& a) const {
    Mat r = Mat::Zero(d_, d_);
    for (int i = 0; i < d_; ++i)
      for (int j = 0; j < d_; ++j)
        for (int k = 0; k < d_; ++k) r(j, k) += (*this)(i, j, k) * a[i];
    return r;
  }

  // Pull back along the columns of B: result(a,b,c) = T(B e_a, B e_b, B e_c).
  Tensor3 pullback(const Mat& B) const {
    const int m = static_cast<int>(B.cols());
    Tensor3 r(m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c) r(a, b, c) = apply(B.col(a), B.col(b), B.col(c));
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  int d_ = 0;
  std::vector<double> v_;
};

}  // namespace capillary
