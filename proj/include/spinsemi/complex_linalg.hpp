#ifndef SPINSEMI_COMPLEX_LINALG_HPP
#define SPINSEMI_COMPLEX_LINALG_HPP

#include <complex>
#include <functional>
#include <initializer_list>
#include <vector>

#include "spinsemi/errors.hpp"

namespace spinsemi::linalg {

using cplx = std::complex<double>;

// Small dense complex matrix (2x2 .. 8x8 in practice). Row major.
// Entries are validated to be finite whenever a matrix is built from data.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(int rows, int cols);
    ComplexMatrix(int rows, int cols, std::vector<cplx> data);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(int n);
    static ComplexMatrix zero(int n) { return ComplexMatrix(n, n); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    cplx& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    const cplx& operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(cplx scalar) const;

    // places `block` with its upper-left corner at (i0, j0)
    void set_block(int i0, int j0, const ComplexMatrix& block);

    void assert_finite() const;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<cplx> data_;
};

// Determinant by partially pivoted LU; closed forms for n <= 2.
cplx det(const ComplexMatrix& m);

// Inverse via Gauss-Jordan with partial pivoting (n <= 8).
ComplexMatrix inverse(const ComplexMatrix& m);

// Square-root branch selection continuous along a continuation path.
// The first call returns the principal root; later calls return the root
// closest to the previously returned value.
struct BranchTracker {
    cplx previous{0.0, 0.0};
    bool initialized = false;
    bool degenerate = false;  // set when asked for sqrt(0) before init
};

cplx sqrt_continuous(cplx z, BranchTracker& tracker);

// Central-difference Jacobian of a holomorphic map C^n -> C^m. The real and
// imaginary difference directions are computed separately and averaged; for
// holomorphic f they agree, so the average also acts as a consistency check.
// Step h <= 0 selects the default 1e-6 scaled by max(1, |x0_k|) per component.
using VectorFn = std::function<std::vector<cplx>(const std::vector<cplx>&)>;
ComplexMatrix finite_difference_jacobian(const VectorFn& f, const std::vector<cplx>& x0,
                                         double h = 0.0);

// Scalar holomorphic derivative by the same scheme.
cplx finite_difference_derivative(const std::function<cplx(cplx)>& f, cplx x0, double h = 0.0);

} // namespace spinsemi::linalg

#endif
