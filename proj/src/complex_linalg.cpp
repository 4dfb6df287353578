#include "spinsemi/complex_linalg.hpp"

#include <cmath>
#include <string>

namespace spinsemi::linalg {

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, cplx{0.0, 0.0}) {
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix dimensions must be positive");
}

ComplexMatrix::ComplexMatrix(int rows, int cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix dimensions must be positive");
    if (data_.size() != static_cast<size_t>(rows) * cols)
        throw DimensionError("matrix data size does not match dimensions");
    assert_finite();
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = static_cast<int>(rows.size());
    if (rows_ == 0) throw DimensionError("matrix dimensions must be positive");
    cols_ = static_cast<int>(rows.begin()->size());
    data_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != cols_) throw DimensionError("ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
    assert_finite();
}

ComplexMatrix ComplexMatrix::identity(int n) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void ComplexMatrix::assert_finite() const {
    for (const cplx& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw NumericError("matrix entry is not finite");
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("shape mismatch in +");
    ComplexMatrix out(rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] + rhs.data_[k];
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("shape mismatch in -");
    ComplexMatrix out(rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] - rhs.data_[k];
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionError("shape mismatch in *");
    ComplexMatrix out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const cplx aik = (*this)(i, k);
            if (aik == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
        }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(cplx scalar) const {
    ComplexMatrix out(rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) out.data_[k] = data_[k] * scalar;
    return out;
}

void ComplexMatrix::set_block(int i0, int j0, const ComplexMatrix& block) {
    if (i0 + block.rows() > rows_ || j0 + block.cols() > cols_)
        throw DimensionError("block does not fit");
    for (int i = 0; i < block.rows(); ++i)
        for (int j = 0; j < block.cols(); ++j) (*this)(i0 + i, j0 + j) = block(i, j);
}

cplx det(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("determinant of non-square matrix");
    m.assert_finite();
    const int n = m.rows();
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);

    // LU with partial pivoting on a working copy
    ComplexMatrix a = m;
    cplx result{1.0, 0.0};
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double mag = std::abs(a(r, col));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) return cplx{0.0, 0.0};
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a(pivot, j), a(col, j));
            result = -result;
        }
        result *= a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const cplx factor = a(r, col) / a(col, col);
            for (int j = col; j < n; ++j) a(r, j) -= factor * a(col, j);
        }
    }
    return result;
}

ComplexMatrix inverse(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("inverse of non-square matrix");
    const int n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix inv = ComplexMatrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double mag = std::abs(a(r, col));
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best == 0.0) throw SingularityError("matrix is singular");
        if (pivot != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        const cplx d = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const cplx factor = a(r, col);
            if (factor == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= factor * a(col, j);
                inv(r, j) -= factor * inv(col, j);
            }
        }
    }
    return inv;
}

cplx sqrt_continuous(cplx z, BranchTracker& tracker) {
    if (!tracker.initialized) {
        if (z == cplx{0.0, 0.0}) {
            tracker.degenerate = true;
            return cplx{0.0, 0.0};
        }
        const cplx root = std::sqrt(z);
        tracker.previous = root;
        tracker.initialized = true;
        return root;
    }
    const cplx root = std::sqrt(z);
    const cplx chosen = (std::abs(root - tracker.previous) <= std::abs(-root - tracker.previous))
                            ? root
                            : -root;
    tracker.previous = chosen;
    return chosen;
}

namespace {

double default_step(double h, cplx x) {
    return h > 0.0 ? h : 1e-6 * std::max(1.0, std::abs(x));
}

} // namespace

ComplexMatrix finite_difference_jacobian(const VectorFn& f, const std::vector<cplx>& x0,
                                         double h) {
    const int n = static_cast<int>(x0.size());
    const std::vector<cplx> f0 = f(x0);
    const int m = static_cast<int>(f0.size());
    ComplexMatrix jac(m, n);
    for (int k = 0; k < n; ++k) {
        const double hk = default_step(h, x0[k]);
        std::vector<cplx> xp = x0, xm = x0;
        xp[k] += hk;
        xm[k] -= hk;
        const std::vector<cplx> fr_p = f(xp), fr_m = f(xm);
        xp = x0;
        xm = x0;
        xp[k] += cplx{0.0, hk};
        xm[k] -= cplx{0.0, hk};
        const std::vector<cplx> fi_p = f(xp), fi_m = f(xm);
        for (int i = 0; i < m; ++i) {
            const cplx d_re = (fr_p[i] - fr_m[i]) / (2.0 * hk);
            const cplx d_im = (fi_p[i] - fi_m[i]) / (cplx{0.0, 2.0 * hk});
            jac(i, k) = 0.5 * (d_re + d_im);
        }
    }
    return jac;
}

cplx finite_difference_derivative(const std::function<cplx(cplx)>& f, cplx x0, double h) {
    const double hk = default_step(h, x0);
    const cplx d_re = (f(x0 + hk) - f(x0 - hk)) / (2.0 * hk);
    const cplx d_im = (f(x0 + cplx{0.0, hk}) - f(x0 - cplx{0.0, hk})) / cplx{0.0, 2.0 * hk};
    return 0.5 * (d_re + d_im);
}

} // namespace spinsemi::linalg
