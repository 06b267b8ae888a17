#include "toepsim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "toepsim/errors.hpp"

namespace toepsim {

ComplexMatrix::ComplexMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw ArgumentError("matrix dimensions must be non-negative");
    }
    data_.assign(static_cast<size_t>(rows) * cols, cplx(0.0, 0.0));
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    }
    return out;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw ArgumentError("matmul: inner dimensions differ");
    ComplexMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0, 0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

cvec matvec(const ComplexMatrix& a, const cvec& x) {
    if (a.cols() != static_cast<int>(x.size())) {
        throw ArgumentError("matvec: dimension mismatch");
    }
    cvec out(static_cast<size_t>(a.rows()), cplx(0.0, 0.0));
    for (int i = 0; i < a.rows(); ++i) {
        cplx acc(0.0, 0.0);
        for (int j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        out[i] = acc;
    }
    return out;
}

ComplexMatrix scale(const ComplexMatrix& a, cplx factor) {
    ComplexMatrix out = a;
    for (auto& v : out.data()) v *= factor;
    return out;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError("add: dimension mismatch");
    }
    ComplexMatrix out = a;
    for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

cplx trace(const ComplexMatrix& a) {
    cplx t(0.0, 0.0);
    for (int i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

ComplexMatrix gram(const ComplexMatrix& a) {
    ComplexMatrix out(a.cols(), a.cols());
    for (int i = 0; i < a.cols(); ++i) {
        for (int j = i; j < a.cols(); ++j) {
            cplx acc(0.0, 0.0);
            for (int r = 0; r < a.rows(); ++r) acc += std::conj(a(r, i)) * a(r, j);
            out(i, j) = acc;
            out(j, i) = std::conj(acc);
        }
    }
    return out;
}

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const auto& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const auto& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    const double bound = tol * std::max(1.0, max_abs(a));
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = i; j < a.cols(); ++j) {
            if (std::abs(a(i, j) - std::conj(a(j, i))) > bound) return false;
        }
    }
    return true;
}

EigResult hermitian_eig(const ComplexMatrix& a, double tol) {
    const int n = a.rows();
    if (n != a.cols()) throw ArgumentError("hermitian_eig: matrix is not square");
    if (!is_hermitian(a, tol)) throw ArgumentError("hermitian_eig: matrix is not Hermitian");

    ComplexMatrix m = a;
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double stop = 1e-14 * std::max(1.0, frobenius_norm(m));

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) s += std::norm(m(i, j));
        }
        return std::sqrt(2.0 * s);
    };

    const int max_sweeps = 100;
    int sweep = 0;
    while (off_norm() > stop) {
        if (++sweep > max_sweeps) {
            throw NumericError("hermitian_eig: Jacobi sweeps did not converge");
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = m(p, q);
                const double mag = std::abs(apq);
                if (mag <= stop / (4.0 * n)) continue;

                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const cplx phase = apq / mag;
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Column update: B = M U with U the (p,q) plane rotation.
                for (int i = 0; i < n; ++i) {
                    const cplx mip = m(i, p);
                    const cplx miq = m(i, q);
                    m(i, p) = c * mip - s * std::conj(phase) * miq;
                    m(i, q) = s * phase * mip + c * miq;
                }
                // Row update: M = U^H B.
                for (int j = 0; j < n; ++j) {
                    const cplx mpj = m(p, j);
                    const cplx mqj = m(q, j);
                    m(p, j) = c * mpj - s * phase * mqj;
                    m(q, j) = s * std::conj(phase) * mpj + c * mqj;
                }
                m(p, q) = cplx(0.0, 0.0);
                m(q, p) = cplx(0.0, 0.0);
                m(p, p) = cplx(m(p, p).real(), 0.0);
                m(q, q) = cplx(m(q, q).real(), 0.0);

                for (int i = 0; i < n; ++i) {
                    const cplx vip = v(i, p);
                    const cplx viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(phase) * viq;
                    v(i, q) = s * phase * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return m(i, i).real() > m(j, j).real(); });

    EigResult out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        out.values[j] = m(order[j], order[j]).real();
        for (int i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
    EigResult eig = hermitian_eig(a);
    double scale = 1.0;
    for (double l : eig.values) scale = std::max(scale, std::abs(l));
    std::vector<double> roots(eig.values.size());
    for (size_t i = 0; i < eig.values.size(); ++i) {
        double l = eig.values[i];
        if (l < -1e-12 * scale) {
            throw ArgumentError("psd_sqrt: matrix has a negative eigenvalue");
        }
        roots[i] = std::sqrt(std::max(l, 0.0));
    }
    const int n = a.rows();
    ComplexMatrix out(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            cplx acc(0.0, 0.0);
            for (int k = 0; k < n; ++k) {
                acc += eig.vectors(i, k) * roots[k] * std::conj(eig.vectors(j, k));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

double min_singular_value(const ComplexMatrix& a) {
    EigResult eig = hermitian_eig(gram(a));
    double lmin = eig.values.empty() ? 0.0 : eig.values.back();
    return std::sqrt(std::max(lmin, 0.0));
}

double psd_det(const ComplexMatrix& a) {
    EigResult eig = hermitian_eig(a);
    double det = 1.0;
    for (double l : eig.values) det *= l;
    return det;
}

QrFactor::QrFactor(const ComplexMatrix& a) : n_(a.rows()), l_(a.cols()), qr_(a) {
    if (n_ < l_) throw ArgumentError("QrFactor: matrix has more columns than rows");
    beta_.assign(l_, 0.0);
    diag_.assign(l_, cplx(0.0, 0.0));
    for (int j = 0; j < l_; ++j) {
        double norm2 = 0.0;
        for (int i = j; i < n_; ++i) norm2 += std::norm(qr_(i, j));
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) {
            diag_[j] = cplx(0.0, 0.0);
            beta_[j] = 0.0;
            continue;
        }
        const cplx a0 = qr_(j, j);
        const double a0abs = std::abs(a0);
        const cplx phase = (a0abs == 0.0) ? cplx(1.0, 0.0) : a0 / a0abs;
        const cplx alpha = -phase * norm;
        qr_(j, j) = a0 - alpha;
        const double vnorm2 = 2.0 * norm * (norm + a0abs);
        beta_[j] = 2.0 / vnorm2;
        diag_[j] = alpha;

        for (int col = j + 1; col < l_; ++col) {
            cplx w(0.0, 0.0);
            for (int i = j; i < n_; ++i) w += std::conj(qr_(i, j)) * qr_(i, col);
            w *= beta_[j];
            for (int i = j; i < n_; ++i) qr_(i, col) -= qr_(i, j) * w;
        }
    }
}

double QrFactor::min_diag() const {
    double m = std::numeric_limits<double>::infinity();
    for (const cplx& d : diag_) m = std::min(m, std::abs(d));
    return l_ == 0 ? 0.0 : m;
}

double QrFactor::max_diag() const {
    double m = 0.0;
    for (const cplx& d : diag_) m = std::max(m, std::abs(d));
    return m;
}

void QrFactor::check_pivots() const {
    if (min_diag() <= 1e-10 * std::max(1.0, max_diag())) {
        throw SingularChannelError("channel matrix is numerically rank deficient");
    }
}

cvec QrFactor::apply_qh(const cvec& y) const {
    if (static_cast<int>(y.size()) != n_) throw ArgumentError("apply_qh: length mismatch");
    cvec z = y;
    for (int j = 0; j < l_; ++j) {
        if (beta_[j] == 0.0) continue;
        cplx w(0.0, 0.0);
        for (int i = j; i < n_; ++i) w += std::conj(qr_(i, j)) * z[i];
        w *= beta_[j];
        for (int i = j; i < n_; ++i) z[i] -= qr_(i, j) * w;
    }
    z.resize(l_);
    return z;
}

cvec QrFactor::back_substitute(const cvec& z) const {
    if (static_cast<int>(z.size()) != l_) {
        throw ArgumentError("back_substitute: length mismatch");
    }
    check_pivots();
    cvec x(z.size());
    for (int i = l_ - 1; i >= 0; --i) {
        cplx acc = z[i];
        for (int k = i + 1; k < l_; ++k) acc -= r(i, k) * x[k];
        x[i] = acc / diag_[i];
    }
    return x;
}

cvec QrFactor::solve(const cvec& y) const { return back_substitute(apply_qh(y)); }

cplx QrFactor::r(int i, int j) const {
    if (i > j) return cplx(0.0, 0.0);
    if (i == j) return diag_[i];
    return qr_(i, j);
}

std::vector<double> QrFactor::gram_inverse_diagonal() const {
    check_pivots();
    // Columns of R^{-1} by back substitution; accumulate squared row norms.
    std::vector<double> diag(l_, 0.0);
    cvec col(l_);
    for (int k = 0; k < l_; ++k) {
        std::fill(col.begin(), col.end(), cplx(0.0, 0.0));
        col[k] = 1.0;
        cvec x(l_);
        for (int i = k; i >= 0; --i) {
            cplx acc = col[i];
            for (int j = i + 1; j <= k; ++j) acc -= r(i, j) * x[j];
            x[i] = acc / diag_[i];
        }
        for (int i = 0; i <= k; ++i) diag[i] += std::norm(x[i]);
    }
    return diag;
}

}  // namespace toepsim
