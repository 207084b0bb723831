#pragma once

// Independent reference computations used to check the library. None of these
// call into the code paths they are compared against.

#include "spheresep/bivector.hpp"
#include "spheresep/rational.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using spheresep::Matrix;
using spheresep::Vector;

/// Bivector components x_i u_j - x_j u_i, i < j, lexicographic.
Vector wedge(const Vector& x, const Vector& u);

/// K_ab at (x, frame) straight from the form's matrix.
Matrix killing_at(const Matrix& b, const Vector& x, const Matrix& frame);

/// Central difference of K along the great circle through x in direction f_c
/// (the frame is parallel along it), (c, a, b) layout.
spheresep::Tensor3 fd_nabla_killing(const Matrix& b, const Vector& x, const Matrix& frame, double h = 1e-5);

/// Faces of K_L with m inner non-root nodes: C(L-2, m) C(L+m, m) / (m+1).
std::uint64_t kirkman_cayley(int leaves, int m);

/// All trees with L leaves: binary trees closed under internal-edge
/// contraction, as text.
std::set<std::string> brute_force_trees(int leaves);

/// Connected components of the graph on all L-leaf trees whose edges are
/// single child-order reversals; each component as a sorted set of texts.
std::vector<std::set<std::string>> reversal_components(int leaves);

/// Textbook spherical coordinates on S^{L-1}:
/// x_{L-1} = sin t_0, x_{L-1-k} = cos t_0 ... cos t_{k-1} sin t_k,
/// x_0 = cos t_0 ... cos t_{L-2}.
Vector spherical(const std::vector<double>& t);

/// Elliptic coordinates of x: the roots of sum_i x_i^2 prod_{j != i}(e_j - l)
/// in each interval (e_{m-1}, e_m), by bisection.
std::vector<double> elliptic_inverse(const std::vector<double>& e, const Vector& x);

/// n(n+1)^2(n+2)/12 computed as dim S^2 so(n+1) - dim Lambda^4 R^{n+1}.
long long killing_dimension(int n);

/// Rational orthogonal matrix (I - S)(I + S)^{-1} from a seeded skew matrix
/// with small integer entries, computed independently of the library.
spheresep::RationalMatrix cayley_frame(int ambient, std::uint64_t seed);

}  // namespace oracle
