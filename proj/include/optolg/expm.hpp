#pragma once

// Dense matrix exponential by scaling and squaring with diagonal Padé
// approximants of degree 3, 5, 7, 9 or 13, selected from the 1-norm of the
// argument (Higham's 2005 thresholds, no balancing).

#include <array>
#include <cmath>

#include <Eigen/Dense>

namespace optolg {

namespace detail {

inline double one_norm(const Eigen::MatrixXcd &a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <std::size_t N>
void pade_low(const Eigen::MatrixXcd &a, const std::array<double, N> &b, Eigen::MatrixXcd &u,
              Eigen::MatrixXcd &v) {
  const auto n = a.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd a2 = a * a;
  Eigen::MatrixXcd power = id; // A^(2k)
  Eigen::MatrixXcd odd = Eigen::MatrixXcd::Zero(n, n);
  v = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < N; k += 2) {
    v += b[k] * power;
    odd += b[k + 1] * power;
    power = power * a2;
  }
  u = a * odd;
}

inline void pade13(const Eigen::MatrixXcd &a, Eigen::MatrixXcd &u, Eigen::MatrixXcd &v) {
  static constexpr std::array<double, 14> b{
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const auto n = a.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd a2 = a * a;
  const Eigen::MatrixXcd a4 = a2 * a2;
  const Eigen::MatrixXcd a6 = a4 * a2;
  const Eigen::MatrixXcd inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

} // namespace detail

/// exp(A) for a dense complex square matrix.
inline Eigen::MatrixXcd expm(const Eigen::MatrixXcd &a) {
  static constexpr std::array<double, 4> b3{120.0, 60.0, 12.0, 1.0};
  static constexpr std::array<double, 6> b5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static constexpr std::array<double, 8> b7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                            25200.0,    1512.0,    56.0,      1.0};
  static constexpr std::array<double, 10> b9{17643225600.0, 8821612800.0, 2075673600.0,
                                             302702400.0,   30270240.0,   2162160.0,
                                             110880.0,      3960.0,       90.0,
                                             1.0};
  constexpr double theta3 = 1.495585217958292e-2;
  constexpr double theta5 = 2.539398330063230e-1;
  constexpr double theta7 = 9.504178996162932e-1;
  constexpr double theta9 = 2.097847961257068e0;
  constexpr double theta13 = 5.371920351148152e0;

  const auto n = a.rows();
  if (n == 0)
    return a;
  const double norm = detail::one_norm(a);

  Eigen::MatrixXcd u, v;
  int squarings = 0;
  if (norm <= theta3) {
    detail::pade_low(a, b3, u, v);
  } else if (norm <= theta5) {
    detail::pade_low(a, b5, u, v);
  } else if (norm <= theta7) {
    detail::pade_low(a, b7, u, v);
  } else if (norm <= theta9) {
    detail::pade_low(a, b9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const Eigen::MatrixXcd scaled = a / std::ldexp(1.0, squarings);
    detail::pade13(scaled, u, v);
  }

  Eigen::MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k)
    r = r * r;
  return r;
}

} // namespace optolg
