#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "pathsig/common.hpp"

namespace pathsig {

namespace detail {

inline void require_finite(Complex z, const char* what) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw NonFiniteInput(std::string(what) + ": entry is not finite");
}

inline void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw NonFiniteInput(std::string(what) + ": value is not finite");
}

inline void require_dimension(int dim, const char* what) {
    if (dim < 1 || dim > kMaxDimension)
        throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(dim) +
                                " outside [1, " + std::to_string(kMaxDimension) + "]");
}

} // namespace detail

/// Dense complex vector of dimension 1..kMaxDimension, value semantics.
class Vector {
public:
    explicit Vector(int dim) : dim_(dim) { detail::require_dimension(dim, "Vector"); }

    Vector(std::initializer_list<Complex> entries) : dim_(static_cast<int>(entries.size())) {
        detail::require_dimension(dim_, "Vector");
        int i = 0;
        for (Complex z : entries) {
            detail::require_finite(z, "Vector");
            entries_[i++] = z;
        }
    }

    static Vector basis(int dim, int index) {
        Vector v(dim);
        if (index < 0 || index >= dim) throw BadSlotIndex("Vector::basis: index out of range");
        v.entries_[index] = Complex{1.0, 0.0};
        return v;
    }

    int dim() const { return dim_; }

    Complex operator[](int i) const { return entries_[i]; }
    Complex& operator[](int i) { return entries_[i]; }

    double squared_norm() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::norm(entries_[i]);
        return s;
    }

    double norm() const { return std::sqrt(squared_norm()); }

    /// ⟨this|rhs⟩, conjugating this vector's entries.
    Complex inner(const Vector& rhs) const {
        if (dim_ != rhs.dim_) throw DimensionMismatch("Vector::inner: dimensions differ");
        Complex s{0.0, 0.0};
        for (int i = 0; i < dim_; ++i) s += std::conj(entries_[i]) * rhs.entries_[i];
        return s;
    }

    Vector& operator+=(const Vector& rhs) {
        if (dim_ != rhs.dim_) throw DimensionMismatch("Vector::operator+=: dimensions differ");
        for (int i = 0; i < dim_; ++i) entries_[i] += rhs.entries_[i];
        return *this;
    }

    Vector& operator*=(Complex z) {
        for (int i = 0; i < dim_; ++i) entries_[i] *= z;
        return *this;
    }

    friend Vector operator*(Complex z, Vector v) {
        v *= z;
        return v;
    }

    double max_abs_diff(const Vector& rhs) const {
        if (dim_ != rhs.dim_) throw DimensionMismatch("Vector::max_abs_diff: dimensions differ");
        double m = 0.0;
        for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(entries_[i] - rhs.entries_[i]));
        return m;
    }

private:
    int dim_;
    std::array<Complex, kMaxDimension> entries_{};
};

/// Dense complex square matrix, row-major, dimension 1..kMaxDimension.
class Matrix {
public:
    explicit Matrix(int dim) : dim_(dim) { detail::require_dimension(dim, "Matrix"); }

    Matrix(int dim, std::initializer_list<Complex> row_major) : dim_(dim) {
        detail::require_dimension(dim, "Matrix");
        if (static_cast<int>(row_major.size()) != dim * dim)
            throw DimensionMismatch("Matrix: entry count does not match dimension");
        int i = 0;
        for (Complex z : row_major) {
            detail::require_finite(z, "Matrix");
            entries_[i++] = z;
        }
    }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = Complex{1.0, 0.0};
        return m;
    }

    int dim() const { return dim_; }

    Complex at(int r, int c) const { return entries_[r * dim_ + c]; }
    Complex& at(int r, int c) { return entries_[r * dim_ + c]; }

    Matrix adjoint() const {
        Matrix m(dim_);
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) m.at(r, c) = std::conj(at(c, r));
        return m;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.dim_ != b.dim_) throw DimensionMismatch("Matrix::operator*: dimensions differ");
        Matrix m(a.dim_);
        for (int r = 0; r < a.dim_; ++r)
            for (int k = 0; k < a.dim_; ++k) {
                const Complex arK = a.at(r, k);
                for (int c = 0; c < a.dim_; ++c) m.at(r, c) += arK * b.at(k, c);
            }
        return m;
    }

    friend Vector operator*(const Matrix& a, const Vector& v) {
        if (a.dim_ != v.dim()) throw DimensionMismatch("Matrix * Vector: dimensions differ");
        Vector out(a.dim_);
        for (int r = 0; r < a.dim_; ++r) {
            Complex s{0.0, 0.0};
            for (int c = 0; c < a.dim_; ++c) s += a.at(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b) {
        if (a.dim_ != b.dim_) throw DimensionMismatch("Matrix::operator+: dimensions differ");
        Matrix m(a.dim_);
        for (int i = 0; i < a.dim_ * a.dim_; ++i) m.entries_[i] = a.entries_[i] + b.entries_[i];
        return m;
    }

    double max_abs_diff(const Matrix& rhs) const {
        if (dim_ != rhs.dim_) throw DimensionMismatch("Matrix::max_abs_diff: dimensions differ");
        double m = 0.0;
        for (int i = 0; i < dim_ * dim_; ++i)
            m = std::max(m, std::abs(entries_[i] - rhs.entries_[i]));
        return m;
    }

    bool is_hermitian(double tol) const {
        for (int r = 0; r < dim_; ++r)
            for (int c = r; c < dim_; ++c)
                if (std::abs(at(r, c) - std::conj(at(c, r))) > tol) return false;
        return true;
    }

    bool is_unitary(double tol) const {
        const Matrix gram = adjoint() * (*this);
        return gram.max_abs_diff(identity(dim_)) <= tol;
    }

private:
    int dim_;
    std::array<Complex, kMaxDimension * kMaxDimension> entries_{};
};

/// A matrix checked to satisfy U†U = I on construction.
class UnitaryMatrix {
public:
    explicit UnitaryMatrix(Matrix m, double tol = kDefaultTolerances.construction) : m_(std::move(m)) {
        if (!m_.is_unitary(tol)) throw Error("UnitaryMatrix: U†U deviates from identity beyond tolerance");
    }

    int dim() const { return m_.dim(); }
    const Matrix& matrix() const { return m_; }

    UnitaryMatrix adjoint() const { return UnitaryMatrix(m_.adjoint()); }

    friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) {
        return UnitaryMatrix(a.m_ * b.m_);
    }

    friend Vector operator*(const UnitaryMatrix& u, const Vector& v) { return u.m_ * v; }

private:
    Matrix m_;
};

struct EigenSystem {
    std::vector<double> eigenvalues; // descending
    std::vector<Vector> eigenvectors;
};

/// Eigenvalues and orthonormal eigenvectors of a Hermitian matrix via cyclic
/// complex Jacobi rotations. Eigenvalues returned in descending order.
inline EigenSystem hermitian_eigensystem(const Matrix& h, const Tolerances& tol = kDefaultTolerances) {
    if (!h.is_hermitian(tol.construction))
        throw NotHermitian("hermitian_eigensystem: matrix is not Hermitian within tolerance");

    const int n = h.dim();
    Matrix a = h;
    Matrix v = Matrix::identity(n);

    double total = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) total += std::norm(h.at(r, c));

    auto off_squared = [&]() {
        double s = 0.0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (r != c) s += std::norm(a.at(r, c));
        return s;
    };

    const double stop = total * 1e-30 + 1e-300;
    for (int sweep = 0; sweep < 100 && off_squared() > stop; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex hpq = a.at(p, q);
                const double habs = std::abs(hpq);
                if (habs * habs <= stop / (n * n)) continue;

                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                const Complex phase = hpq / habs;
                const double zeta = (aqq - app) / (2.0 * habs);
                const double sgn = zeta >= 0.0 ? 1.0 : -1.0;
                const double t = sgn / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Unitary block J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] zeroes a[p][q].
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c * std::conj(phase);

                for (int r = 0; r < n; ++r) { // right multiply: a ← a·J, v ← v·J
                    const Complex arp = a.at(r, p), arq = a.at(r, q);
                    a.at(r, p) = c * arp + jqp * arq;
                    a.at(r, q) = s * arp + jqq * arq;
                    const Complex vrp = v.at(r, p), vrq = v.at(r, q);
                    v.at(r, p) = c * vrp + jqp * vrq;
                    v.at(r, q) = s * vrp + jqq * vrq;
                }
                for (int col = 0; col < n; ++col) { // left multiply: a ← J†·a
                    const Complex apc = a.at(p, col), aqc = a.at(q, col);
                    a.at(p, col) = c * apc + std::conj(jqp) * aqc;
                    a.at(q, col) = s * apc + std::conj(jqq) * aqc;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a.at(i, i).real() > a.at(j, j).real(); });

    EigenSystem sys;
    for (int k : order) {
        sys.eigenvalues.push_back(a.at(k, k).real());
        Vector col(n);
        for (int r = 0; r < n; ++r) col[r] = v.at(r, k);
        sys.eigenvectors.push_back(col);
    }
    return sys;
}

/// Measured quantity: outcomes sorted by descending eigenvalue, each carrying an
/// orthonormal basis of its eigenspace (rank ≥ 1 allows degenerate spectra).
class Observable {
public:
    struct Outcome {
        double eigenvalue;
        std::vector<Vector> eigenvectors;
    };

    explicit Observable(std::vector<Outcome> outcomes, const Tolerances& tol = kDefaultTolerances)
        : outcomes_(std::move(outcomes)) {
        if (outcomes_.empty()) throw Error("Observable: needs at least one outcome");
        std::stable_sort(outcomes_.begin(), outcomes_.end(),
                         [](const Outcome& a, const Outcome& b) { return a.eigenvalue > b.eigenvalue; });

        dim_ = 0;
        for (const Outcome& o : outcomes_) {
            detail::require_finite(o.eigenvalue, "Observable");
            if (o.eigenvectors.empty()) throw Error("Observable: outcome without eigenvectors");
            dim_ = o.eigenvectors.front().dim();
        }
        for (std::size_t i = 0; i + 1 < outcomes_.size(); ++i)
            if (std::abs(outcomes_[i].eigenvalue - outcomes_[i + 1].eigenvalue) <= tol.equality)
                throw Error("Observable: outcome eigenvalues are not distinct");

        std::vector<const Vector*> all;
        for (const Outcome& o : outcomes_)
            for (const Vector& e : o.eigenvectors) {
                if (e.dim() != dim_) throw DimensionMismatch("Observable: mixed eigenvector dimensions");
                all.push_back(&e);
            }
        if (static_cast<int>(all.size()) != dim_)
            throw Error("Observable: projectors do not resolve the identity");
        for (std::size_t i = 0; i < all.size(); ++i)
            for (std::size_t j = i; j < all.size(); ++j) {
                const Complex g = all[i]->inner(*all[j]);
                const Complex want = i == j ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
                if (std::abs(g - want) > tol.construction)
                    throw Error("Observable: eigenvectors are not orthonormal within tolerance");
            }
    }

    /// Qubit quantity with eigenvalue +1 on basis state 0 and -1 on basis state 1.
    static Observable pauli_z() {
        return Observable({{+1.0, {Vector::basis(2, 0)}}, {-1.0, {Vector::basis(2, 1)}}});
    }

    /// Diagonalizes a Hermitian matrix and groups eigenvalues equal within the
    /// equality tolerance into one (possibly degenerate) outcome.
    static Observable from_hermitian(const Matrix& m, const Tolerances& tol = kDefaultTolerances) {
        const EigenSystem sys = hermitian_eigensystem(m, tol);
        std::vector<Outcome> outcomes;
        for (std::size_t k = 0; k < sys.eigenvalues.size(); ++k) {
            if (!outcomes.empty() &&
                std::abs(outcomes.back().eigenvalue - sys.eigenvalues[k]) <= tol.equality) {
                outcomes.back().eigenvectors.push_back(sys.eigenvectors[k]);
            } else {
                outcomes.push_back({sys.eigenvalues[k], {sys.eigenvectors[k]}});
            }
        }
        return Observable(std::move(outcomes), tol);
    }

    int dim() const { return dim_; }
    int outcome_count() const { return static_cast<int>(outcomes_.size()); }
    const Outcome& outcome(int i) const { return outcomes_[static_cast<std::size_t>(i)]; }
    double eigenvalue(int i) const { return outcomes_[static_cast<std::size_t>(i)].eigenvalue; }

    Matrix projector(int i) const {
        Matrix p(dim_);
        for (const Vector& e : outcomes_[static_cast<std::size_t>(i)].eigenvectors)
            for (int r = 0; r < dim_; ++r)
                for (int c = 0; c < dim_; ++c) p.at(r, c) += e[r] * std::conj(e[c]);
        return p;
    }

    /// P_i |v⟩ without forming the projector matrix.
    Vector project(int i, const Vector& v) const {
        Vector out(dim_);
        for (const Vector& e : outcomes_[static_cast<std::size_t>(i)].eigenvectors) {
            const Complex w = e.inner(v);
            for (int r = 0; r < dim_; ++r) out[r] += w * e[r];
        }
        return out;
    }

    bool is_dichotomic(double tol) const {
        for (const Outcome& o : outcomes_)
            if (std::abs(std::abs(o.eigenvalue) - 1.0) > tol) return false;
        return true;
    }

private:
    std::vector<Outcome> outcomes_;
    int dim_ = 0;
};

/// Two-level flip propagator cos(t)·I − i·sin(t)·X at unit frequency.
inline UnitaryMatrix rabi_unitary(double t) {
    detail::require_finite(t, "rabi_unitary");
    const double c = std::cos(t), s = std::sin(t);
    return UnitaryMatrix(Matrix(2, {Complex{c, 0.0}, Complex{0.0, -s},
                                    Complex{0.0, -s}, Complex{c, 0.0}}));
}

/// exp(−i·H·t) for Hermitian H, built from the spectral decomposition.
inline UnitaryMatrix hermitian_propagator(const Matrix& h, double t,
                                          const Tolerances& tol = kDefaultTolerances) {
    detail::require_finite(t, "hermitian_propagator");
    if (!h.is_hermitian(tol.construction))
        throw NotHermitian("hermitian_propagator: matrix is not Hermitian within tolerance");
    const EigenSystem sys = hermitian_eigensystem(h, tol);
    const int n = h.dim();
    Matrix u(n);
    for (int k = 0; k < n; ++k) {
        const Complex ph = std::exp(Complex{0.0, -sys.eigenvalues[static_cast<std::size_t>(k)] * t});
        const Vector& e = sys.eigenvectors[static_cast<std::size_t>(k)];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) u.at(r, c) += ph * e[r] * std::conj(e[c]);
    }
    return UnitaryMatrix(std::move(u), tol.construction);
}

/// ⟨bra| U |ket⟩
inline Complex transition_amplitude(const Vector& bra, const UnitaryMatrix& u, const Vector& ket) {
    if (bra.dim() != u.dim() || ket.dim() != u.dim())
        throw DimensionMismatch("transition_amplitude: dimensions differ");
    return bra.inner(u * ket);
}

} // namespace pathsig
