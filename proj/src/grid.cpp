#include "ncbogo/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "ncbogo/errors.hpp"

namespace ncbogo {

namespace {

// The FFTW planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace

const char* to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "box"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "box") return Boundary::box;
    throw ConfigurationError("unknown boundary '" + s + "' (allowed: periodic, box)");
}

struct Grid1D::Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    fftw_plan sine = nullptr;
    mutable std::once_flag kinetic_once;
    mutable Eigen::MatrixXd kinetic;

    ~Plans() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (sine) fftw_destroy_plan(sine);
    }
};

Grid1D::Grid1D(int n_points, double length, Boundary boundary, double origin)
    : n_(n_points), length_(length), origin_(origin), boundary_(boundary),
      plans_(std::make_unique<Plans>()) {
    if (n_points < 8)
        throw ConfigurationError("grid needs at least 8 points, got " + std::to_string(n_points));
    if (!(length > 0.0) || !std::isfinite(length))
        throw ConfigurationError("grid length must be positive");
    if (boundary == Boundary::periodic && !is_power_of_two(n_points))
        throw ConfigurationError("periodic grid requires a power-of-two n_points, got " +
                                 std::to_string(n_points));

    points_.resize(n_);
    k_.resize(n_);
    const double pi = std::numbers::pi;
    if (boundary == Boundary::periodic) {
        dx_ = length / n_;
        for (int j = 0; j < n_; ++j) {
            points_[j] = origin + j * dx_;
            const int m = j < n_ / 2 ? j : j - n_;
            k_[j] = 2.0 * pi * m / length;
        }
    } else {
        dx_ = length / (n_ + 1);
        for (int j = 0; j < n_; ++j) {
            points_[j] = origin + (j + 1) * dx_;
            k_[j] = pi * (j + 1) / length;
        }
    }

    std::vector<cplx> a(n_), b(n_);
    std::vector<double> ra(n_), rb(n_);
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (boundary == Boundary::periodic) {
        auto* in = reinterpret_cast<fftw_complex*>(a.data());
        auto* out = reinterpret_cast<fftw_complex*>(b.data());
        plans_->forward = fftw_plan_dft_1d(n_, in, out, FFTW_FORWARD, flags);
        plans_->backward = fftw_plan_dft_1d(n_, in, out, FFTW_BACKWARD, flags);
    } else {
        plans_->sine = fftw_plan_r2r_1d(n_, ra.data(), rb.data(), FFTW_RODFT00, flags);
    }
}

Grid1D::~Grid1D() = default;

bool Grid1D::same_as(const Grid1D& o) const {
    return this == &o || (n_ == o.n_ && length_ == o.length_ && origin_ == o.origin_ &&
                          boundary_ == o.boundary_);
}

Eigen::VectorXcd Grid1D::spectral_multiply(const Eigen::VectorXcd& values,
                                           const Eigen::VectorXcd& multiplier) const {
    if (values.size() != n_ || multiplier.size() != n_)
        throw DimensionError("spectral_multiply: size mismatch");
    Eigen::VectorXcd out(n_);
    if (boundary_ == Boundary::periodic) {
        Eigen::VectorXcd in = values;
        Eigen::VectorXcd spec(n_);
        fftw_execute_dft(plans_->forward, reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(spec.data()));
        spec = spec.cwiseProduct(multiplier) / static_cast<double>(n_);
        fftw_execute_dft(plans_->backward, reinterpret_cast<fftw_complex*>(spec.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
        return out;
    }
    // DST-I is its own inverse up to a factor 2(n+1); transform real and
    // imaginary parts separately.
    Eigen::VectorXd re = values.real(), im = values.imag();
    Eigen::VectorXd sre(n_), sim(n_);
    fftw_execute_r2r(plans_->sine, re.data(), sre.data());
    fftw_execute_r2r(plans_->sine, im.data(), sim.data());
    Eigen::VectorXcd spec(n_);
    for (int j = 0; j < n_; ++j) spec[j] = cplx(sre[j], sim[j]) * multiplier[j];
    re = spec.real();
    im = spec.imag();
    fftw_execute_r2r(plans_->sine, re.data(), sre.data());
    fftw_execute_r2r(plans_->sine, im.data(), sim.data());
    const double scale = 1.0 / (2.0 * (n_ + 1));
    for (int j = 0; j < n_; ++j) out[j] = cplx(sre[j], sim[j]) * scale;
    return out;
}

Eigen::VectorXcd Grid1D::spectral_multiply(const Eigen::VectorXcd& values,
                                           const Eigen::VectorXd& multiplier) const {
    return spectral_multiply(values, Eigen::VectorXcd(multiplier.cast<cplx>()));
}

const Eigen::MatrixXd& Grid1D::kinetic_matrix() const {
    std::call_once(plans_->kinetic_once, [this] {
        const Eigen::VectorXd mult = 0.5 * k_.array().square();
        Eigen::MatrixXd t(n_, n_);
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n_);
        for (int j = 0; j < n_; ++j) {
            e.setZero();
            e[j] = 1.0;
            t.col(j) = spectral_multiply(e, mult).real();
        }
        plans_->kinetic = 0.5 * (t + t.transpose());
    });
    return plans_->kinetic;
}

int Grid1D::mirror_index(int j) const {
    if (boundary_ == Boundary::box) return n_ - 1 - j;
    return (n_ - j) % n_;
}

GridPtr build_grid(int n_points, double length, Boundary boundary, double origin) {
    return std::make_shared<const Grid1D>(n_points, length, boundary, origin);
}

ComplexField::ComplexField(GridPtr g) : grid(std::move(g)) {
    values = Eigen::VectorXcd::Zero(grid->n_points());
}

ComplexField::ComplexField(GridPtr g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid->n_points())
        throw DimensionError("field has " + std::to_string(values.size()) + " values on a " +
                             std::to_string(grid->n_points()) + "-point grid");
}

ComplexField ComplexField::from_function(GridPtr g, const std::function<cplx(double)>& f) {
    ComplexField out(g);
    for (int j = 0; j < g->n_points(); ++j) out.values[j] = f(g->points()[j]);
    return out;
}

void require_same_grid(const ComplexField& a, const ComplexField& b) {
    if (!a.grid || !b.grid) throw DimensionError("field without a grid");
    if (!a.grid->same_as(*b.grid)) throw DimensionError("fields live on different grids");
    if (a.values.size() != b.values.size()) throw DimensionError("field sizes differ");
}

ComplexField& ComplexField::operator+=(const ComplexField& o) {
    require_same_grid(*this, o);
    values += o.values;
    return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& o) {
    require_same_grid(*this, o);
    values -= o.values;
    return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
    values *= s;
    return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }
ComplexField operator*(ComplexField a, cplx s) { return a *= s; }

ComplexField apply_kinetic(const ComplexField& f) {
    if (!f.grid) throw DimensionError("field without a grid");
    const auto& g = *f.grid;
    const Eigen::VectorXd mult = 0.5 * g.wavenumbers().array().square();
    return ComplexField(f.grid, g.spectral_multiply(f.values, mult));
}

cplx inner_product(const ComplexField& f, const ComplexField& g) {
    require_same_grid(f, g);
    return f.values.dot(g.values) * f.grid->spacing();
}

double norm(const ComplexField& f) {
    return std::sqrt(f.values.squaredNorm() * f.grid->spacing());
}

ComplexField normalized(const ComplexField& f) {
    const double n = norm(f);
    if (!(n > 0.0)) throw DegeneracyError("cannot normalize a zero field", 0);
    return ComplexField(f.grid, f.values / n);
}

ComplexField multiply(const Eigen::VectorXd& weight, const ComplexField& f) {
    if (weight.size() != f.values.size()) throw DimensionError("multiply: size mismatch");
    return ComplexField(f.grid, weight.cast<cplx>().cwiseProduct(f.values));
}

std::vector<ComplexField> orthonormalize(const std::vector<ComplexField>& fields,
                                         const std::optional<ComplexField>& against) {
    std::optional<ComplexField> ref;
    if (against) ref = normalized(*against);
    std::vector<ComplexField> out;
    out.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        ComplexField v = fields[i];
        if (ref) require_same_grid(*ref, v);
        const double input_norm = norm(v);
        if (!(input_norm > 0.0))
            throw DegeneracyError("orthonormalize: field " + std::to_string(i) + " is zero", i);
        for (int pass = 0; pass < 2; ++pass) {
            if (ref) v -= inner_product(*ref, v) * (*ref);
            for (const auto& q : out) v -= inner_product(q, v) * q;
        }
        const double n = norm(v);
        if (n < 1e-10 * input_norm)
            throw DegeneracyError("orthonormalize: field " + std::to_string(i) +
                                      " is linearly dependent on the preceding fields",
                                  i);
        v.values /= n;
        out.push_back(std::move(v));
    }
    return out;
}

ComplexField reflect(const ComplexField& f) {
    ComplexField out(f.grid);
    for (int j = 0; j < f.size(); ++j) out.values[j] = f.values[f.grid->mirror_index(j)];
    return out;
}

} // namespace ncbogo
