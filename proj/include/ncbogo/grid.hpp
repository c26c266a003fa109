#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncbogo {

using cplx = std::complex<double>;

enum class Boundary { periodic, box };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

class Grid1D;
using GridPtr = std::shared_ptr<const Grid1D>;

/// Uniform one-dimensional grid with a spectral representation of -d^2/dx^2.
///
/// Periodic grids use the discrete Fourier basis on [origin, origin + length)
/// and require a power-of-two number of points. Box grids place n interior
/// points on (origin, origin + length) with hard walls, and use the sine
/// (DST-I) basis, which is exact for fields vanishing at both walls.
class Grid1D {
public:
    Grid1D(int n_points, double length, Boundary boundary, double origin);
    ~Grid1D();
    Grid1D(const Grid1D&) = delete;
    Grid1D& operator=(const Grid1D&) = delete;

    int n_points() const { return n_; }
    double length() const { return length_; }
    double origin() const { return origin_; }
    Boundary boundary() const { return boundary_; }
    /// Quadrature weight: length/n (periodic) or length/(n+1) (box).
    double spacing() const { return dx_; }
    const Eigen::VectorXd& points() const { return points_; }
    /// Spectral wavenumbers in transform order: FFT order for periodic grids,
    /// pi*m/length (m = 1..n) for box grids.
    const Eigen::VectorXd& wavenumbers() const { return k_; }

    bool same_as(const Grid1D& other) const;

    /// Transforms to the spectral basis, multiplies coefficient j by
    /// multiplier[j], and transforms back.
    Eigen::VectorXcd spectral_multiply(const Eigen::VectorXcd& values,
                                       const Eigen::VectorXcd& multiplier) const;
    Eigen::VectorXcd spectral_multiply(const Eigen::VectorXcd& values,
                                       const Eigen::VectorXd& multiplier) const;

    /// Real symmetric matrix of -1/2 d^2/dx^2 in the grid-point representation.
    /// Built on first use; safe to call concurrently.
    const Eigen::MatrixXd& kinetic_matrix() const;

    /// Index of the mirror image of point j under x -> 2c - x where c is the
    /// grid centre.
    int mirror_index(int j) const;

private:
    struct Plans;

    int n_;
    double length_;
    double origin_;
    Boundary boundary_;
    double dx_;
    Eigen::VectorXd points_;
    Eigen::VectorXd k_;
    std::unique_ptr<Plans> plans_;
};

GridPtr build_grid(int n_points, double length, Boundary boundary, double origin = 0.0);

/// Complex amplitudes sampled on a grid.
struct ComplexField {
    GridPtr grid;
    Eigen::VectorXcd values;

    ComplexField() = default;
    explicit ComplexField(GridPtr g);
    ComplexField(GridPtr g, Eigen::VectorXcd v);

    static ComplexField from_function(GridPtr g, const std::function<cplx(double)>& f);

    int size() const { return static_cast<int>(values.size()); }

    ComplexField& operator+=(const ComplexField& o);
    ComplexField& operator-=(const ComplexField& o);
    ComplexField& operator*=(cplx s);
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
ComplexField operator*(ComplexField a, cplx s);

/// Throws DimensionError unless both fields live on equivalent grids.
void require_same_grid(const ComplexField& a, const ComplexField& b);

/// -1/2 d^2 f/dx^2, computed spectrally.
ComplexField apply_kinetic(const ComplexField& f);

/// sum_i conj(f_i) g_i dx
cplx inner_product(const ComplexField& f, const ComplexField& g);
double norm(const ComplexField& f);
ComplexField normalized(const ComplexField& f);

/// Pointwise product with a real function sampled on the grid.
ComplexField multiply(const Eigen::VectorXd& weight, const ComplexField& f);

/// Modified Gram-Schmidt (with one re-orthogonalization pass). When `against`
/// is given every output is orthogonal to it. A field whose remaining norm
/// falls below 1e-10 of its input norm raises DegeneracyError carrying its index.
std::vector<ComplexField> orthonormalize(const std::vector<ComplexField>& fields,
                                         const std::optional<ComplexField>& against = std::nullopt);

/// f reflected about the grid centre.
ComplexField reflect(const ComplexField& f);

} // namespace ncbogo
