#pragma once

#include <complex>

#include <Eigen/Dense>

namespace fluxq {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

// Index convention for coefficient tables: 0 = identity, 1 = x, 2 = y, 3 = z.
// Single-qubit basis order is (down, up): sigma_z = diag(-1, 1).
template <typename Real>
Matrix2<std::complex<Real>> pauli(int a) {
    using C = std::complex<Real>;
    Matrix2<C> m = Matrix2<C>::Zero();
    switch (a) {
        case 0: m << C(1), C(0), C(0), C(1); break;
        case 1: m << C(0), C(1), C(1), C(0); break;
        case 2: m << C(0), C(0, 1), C(0, -1), C(0); break;
        case 3: m << C(-1), C(0), C(0), C(1); break;
    }
    return m;
}

template <typename DerivedA, typename DerivedB>
Matrix4<typename DerivedA::Scalar> kron2(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
    Matrix4<typename DerivedA::Scalar> k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k.template block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return k;
}

template <typename Real>
Matrix4<std::complex<Real>> pauli_product(int a, int b) {
    return kron2(pauli<Real>(a), pauli<Real>(b));
}

// c(a, b) = Tr[H (sigma_a x sigma_b)] / 4. Real for Hermitian H.
template <typename Derived>
Eigen::Matrix<typename Eigen::NumTraits<typename Derived::Scalar>::Real, 4, 4> pauli_decompose(
    const Eigen::MatrixBase<Derived>& h) {
    using Real = typename Eigen::NumTraits<typename Derived::Scalar>::Real;
    const Matrix4<std::complex<Real>> hc = h.template cast<std::complex<Real>>();
    Eigen::Matrix<Real, 4, 4> c;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) c(a, b) = (hc * pauli_product<Real>(a, b)).trace().real() / Real(4);
    return c;
}

template <typename Real>
Matrix4<std::complex<Real>> pauli_compose(const Eigen::Matrix<Real, 4, 4>& c) {
    Matrix4<std::complex<Real>> h = Matrix4<std::complex<Real>>::Zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) h += c(a, b) * pauli_product<Real>(a, b);
    return h;
}

}  // namespace fluxq
