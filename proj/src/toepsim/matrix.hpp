#pragma once

#include <complex>
#include <vector>

namespace toepsim {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Dense column-count-immutable complex matrix, row major.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols);

    static ComplexMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const {
        return data_[static_cast<size_t>(i) * cols_ + j];
    }

    const cvec& data() const { return data_; }
    cvec& data() { return data_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    cvec data_;
};

ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
cvec matvec(const ComplexMatrix& a, const cvec& x);
ComplexMatrix scale(const ComplexMatrix& a, cplx factor);
ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
cplx trace(const ComplexMatrix& a);

// Gram matrix A^H A.
ComplexMatrix gram(const ComplexMatrix& a);

double max_abs(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol = 1e-12);

struct EigResult {
    std::vector<double> values;   // descending
    ComplexMatrix vectors;        // columns, aligned with values
};

// Eigendecomposition of a Hermitian matrix via cyclic Jacobi rotations.
// Throws ArgumentError when the input is not Hermitian within `tol`
// relative to its magnitude.
EigResult hermitian_eig(const ComplexMatrix& a, double tol = 1e-12);

// Hermitian square root S of a PSD matrix (S * S^H == a). Eigenvalues in
// [-1e-12 * scale, 0) are clamped to zero; anything lower throws.
ComplexMatrix psd_sqrt(const ComplexMatrix& a);

// Smallest singular value, computed from the eigenvalues of the Gram matrix.
double min_singular_value(const ComplexMatrix& a);

// Determinant of a Hermitian PSD matrix (product of eigenvalues).
double psd_det(const ComplexMatrix& a);

// Householder QR of an N x L matrix with N >= L. Stores the reflectors and
// the upper triangle; solves least squares via back substitution.
class QrFactor {
  public:
    explicit QrFactor(const ComplexMatrix& a);

    int rows() const { return n_; }
    int cols() const { return l_; }

    // |R(i,i)| minimum, used as the rank guard for back substitution.
    double min_diag() const;
    double max_diag() const;

    // First L entries of Q^H y.
    cvec apply_qh(const cvec& y) const;

    // Solves R x = z for upper triangular R. Throws SingularChannelError
    // when a pivot is numerically zero.
    cvec back_substitute(const cvec& z) const;

    // Least squares solution argmin ||a x - y||.
    cvec solve(const cvec& y) const;

    cplx r(int i, int j) const;

    // Diagonal of (A^H A)^{-1}, from the squared row norms of R^{-1}.
    std::vector<double> gram_inverse_diagonal() const;

  private:
    int n_ = 0;
    int l_ = 0;
    ComplexMatrix qr_;            // reflectors at and below diagonal, R above
    cvec diag_;                   // diagonal of R
    std::vector<double> beta_;    // reflector scales
    void check_pivots() const;
};

}  // namespace toepsim
