#include "ncbogo/bdg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ncbogo/errors.hpp"

namespace ncbogo {

namespace {

constexpr double kNormThreshold = 1e-8;
constexpr double kStabilityTol = 1e-9;

bool potential_is_constant(const ComplexField& v) {
    const Eigen::VectorXd re = v.values.real();
    return (re.array() - re[0]).abs().maxCoeff() == 0.0 && v.values.imag().cwiseAbs().maxCoeff() == 0.0;
}

std::vector<ComplexField> plane_waves(const GridPtr& grid, int count) {
    std::vector<ComplexField> out;
    const double L = grid->length();
    const double amp = 1.0 / std::sqrt(L);
    for (int m = 1; static_cast<int>(out.size()) < count; ++m) {
        for (int sign : {+1, -1}) {
            if (static_cast<int>(out.size()) == count) break;
            const double k = sign * 2.0 * M_PI * m / L;
            const double x0 = grid->origin();
            out.push_back(ComplexField::from_function(
                grid, [=](double x) { return amp * std::exp(cplx(0.0, k * (x - x0))); }));
        }
    }
    return out;
}

Eigen::MatrixXcd sigma_z(int k) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Identity(2 * k, 2 * k);
    s.bottomRightCorner(k, k) *= -1.0;
    return s;
}

Eigen::MatrixXcd bdg_form(const QuadraticHamiltonian& qh) {
    const int k = qh.size();
    Eigen::MatrixXcd h(2 * k, 2 * k);
    h.topLeftCorner(k, k) = qh.m_matrix;
    h.topRightCorner(k, k) = qh.g_matrix;
    h.bottomLeftCorner(k, k) = qh.g_matrix.conjugate();
    h.bottomRightCorner(k, k) = qh.m_matrix.conjugate();
    return h;
}

struct Branch {
    cplx eps;
    Eigen::VectorXcd w;
    bool anomalous;
};

// Positive-definite form: H = L L^+, W = L^+ sigma L is Hermitian with
// eigenvalues +-eps; T = L^-+ U |Lambda|^1/2 is exactly symplectic.
bool solve_cholesky(const Eigen::MatrixXcd& h, int k, std::vector<Branch>& out) {
    Eigen::LLT<Eigen::MatrixXcd> llt(h);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXcd l = llt.matrixL();
    if (!l.allFinite() || l.diagonal().real().minCoeff() <= 0.0) return false;
    const Eigen::MatrixXcd w = l.adjoint() * sigma_z(k) * l;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (w + w.adjoint()));
    if (es.info() != Eigen::Success) return false;
    const Eigen::VectorXd& lam = es.eigenvalues();
    // Ascending: k negative then k positive eigenvalues.
    if (lam[k - 1] >= 0.0 || lam[k] <= 0.0) return false;
    const auto lt = l.adjoint().triangularView<Eigen::Upper>();
    for (int m = 0; m < k; ++m) {
        const double e = lam[k + m];
        Eigen::VectorXcd t = lt.solve(Eigen::VectorXcd(es.eigenvectors().col(k + m)));
        t *= std::sqrt(e);
        out.push_back({cplx(e, 0.0), std::move(t), false});
    }
    return true;
}

void solve_general(const Eigen::MatrixXcd& h, int k, std::vector<Branch>& out) {
    const Eigen::MatrixXcd b = sigma_z(k) * h;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b);
    if (es.info() != Eigen::Success) throw ConvergenceError("BdG eigensolver failed", 0.0);
    std::vector<Branch> positive, zero;
    for (int i = 0; i < 2 * k; ++i) {
        Eigen::VectorXcd w = es.eigenvectors().col(i);
        const double total = w.squaredNorm();
        const double sn = w.head(k).squaredNorm() - w.tail(k).squaredNorm();
        if (sn > kNormThreshold * total) {
            w /= std::sqrt(sn);
            positive.push_back({es.eigenvalues()[i], std::move(w), false});
        } else if (std::abs(sn) <= kNormThreshold * total) {
            w /= std::sqrt(total);
            zero.push_back({es.eigenvalues()[i], std::move(w), true});
        }
    }
    auto by_energy = [](const Branch& a, const Branch& b) {
        if (a.eps.real() != b.eps.real()) return a.eps.real() < b.eps.real();
        return a.eps.imag() < b.eps.imag();
    };
    std::sort(positive.begin(), positive.end(), by_energy);
    // Zero-norm eigenvalues come in quadruplets (eps, eps*, -eps, -eps*); keep
    // the representatives with nonnegative real and imaginary parts first.
    std::stable_sort(zero.begin(), zero.end(), [](const Branch& a, const Branch& b) {
        auto rank = [](const Branch& x) {
            return (x.eps.real() >= -kStabilityTol ? 0 : 2) + (x.eps.imag() >= 0.0 ? 0 : 1);
        };
        return rank(a) < rank(b);
    });
    for (auto& p : positive) {
        if (static_cast<int>(out.size()) == k) break;
        out.push_back(std::move(p));
    }
    for (auto& z : zero) {
        if (static_cast<int>(out.size()) == k) break;
        out.push_back(std::move(z));
    }
    if (static_cast<int>(out.size()) != k)
        throw ConvergenceError("BdG problem does not have " + std::to_string(k) +
                                   " positive-norm or anomalous branches",
                               0.0);
}

} // namespace

Eigen::MatrixXcd PhononBasis::matrix() const {
    const int k = size();
    const int n = condensate.size();
    Eigen::MatrixXcd m(n, k);
    for (int j = 0; j < k; ++j) m.col(j) = modes[j].values;
    return m;
}

double PhononBasis::gram_deviation() const {
    if (modes.empty()) return 0.0;
    const Eigen::MatrixXcd m = matrix();
    const Eigen::MatrixXcd g = condensate.grid->spacing() * (m.adjoint() * m);
    return (g - Eigen::MatrixXcd::Identity(size(), size())).cwiseAbs().maxCoeff();
}

double PhononBasis::condensate_overlap() const {
    double worst = 0.0;
    for (const auto& f : modes) worst = std::max(worst, std::abs(inner_product(condensate, f)));
    return worst;
}

PhononBasis build_phonon_basis(const CondensateState& state, int K) {
    const GridPtr& grid = state.xi.grid;
    const int n = grid->n_points();
    if (K < 1 || K >= n - 1)
        throw ConfigurationError("phonon basis size K must satisfy 1 <= K < n_points - 1 (K = " +
                                 std::to_string(K) + ", n_points = " + std::to_string(n) + ")");
    PhononBasis basis;
    basis.condensate = state.xi;

    if (grid->boundary() == Boundary::periodic && potential_is_constant(state.potential)) {
        basis.modes = orthonormalize(plane_waves(grid, K), state.xi);
        return basis;
    }

    Eigen::MatrixXd h = grid->kinetic_matrix();
    h.diagonal() += state.potential.values.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw ConvergenceError("single-particle eigensolver failed", 0.0);

    const double scale = 1.0 / std::sqrt(grid->spacing());
    std::vector<ComplexField> candidates;
    int drop = 0;
    double best = -1.0;
    for (int j = 0; j <= K; ++j) {
        ComplexField f(grid, (scale * es.eigenvectors().col(j)).cast<cplx>());
        const double ov = std::abs(inner_product(state.xi, f));
        if (ov > best) {
            best = ov;
            drop = j;
        }
        candidates.push_back(std::move(f));
    }
    candidates.erase(candidates.begin() + drop);
    basis.modes = orthonormalize(candidates, state.xi);
    return basis;
}

PhononBasis basis_from_fields(const CondensateState& state, const std::vector<ComplexField>& fields) {
    PhononBasis basis;
    basis.condensate = state.xi;
    const ComplexField ref = normalized(state.xi);
    for (const auto& f : fields) {
        ComplexField v = f;
        const double input_norm = norm(v);
        if (!(input_norm > 0.0)) continue;
        for (int pass = 0; pass < 2; ++pass) {
            v -= inner_product(ref, v) * ref;
            for (const auto& q : basis.modes) v -= inner_product(q, v) * q;
        }
        const double nv = norm(v);
        if (nv < 1e-8 * input_norm) continue;
        v.values /= nv;
        basis.modes.push_back(std::move(v));
    }
    return basis;
}

Eigen::MatrixXcd projector_kernel(const PhononBasis& basis) {
    const Eigen::MatrixXcd m = basis.matrix();
    return m * m.adjoint();
}

QuadraticHamiltonian make_quadratic(Eigen::MatrixXcd m, Eigen::MatrixXcd g, double e3) {
    if (m.rows() != m.cols() || g.rows() != g.cols() || m.rows() != g.rows())
        throw DimensionError("M and G must be square matrices of equal size");
    QuadraticHamiltonian qh;
    qh.m_matrix = 0.5 * (m + m.adjoint());
    qh.g_matrix = 0.5 * (g + g.transpose());
    qh.l_matrix = qh.m_matrix;
    qh.f_matrix = Eigen::MatrixXcd::Zero(m.rows(), m.cols());
    qh.e3 = e3;
    return qh;
}

QuadraticHamiltonian assemble(const CondensateState& state, const PhononBasis& basis) {
    return assemble(state.xi, state.potential, state.u_tilde, state.mu, basis);
}

QuadraticHamiltonian assemble(const ComplexField& xi, const ComplexField& potential, double u_tilde,
                              double mu, const PhononBasis& basis) {
    require_same_grid(xi, potential);
    if (!basis.condensate.grid || !basis.condensate.grid->same_as(*xi.grid))
        throw DimensionError("phonon basis and condensate live on different grids");
    const int k = basis.size();
    const double dx = xi.grid->spacing();
    const Eigen::MatrixXcd phi = basis.matrix();

    Eigen::MatrixXcd h0phi(phi.rows(), k);
    const Eigen::VectorXd v = potential.values.real();
    for (int q = 0; q < k; ++q) {
        h0phi.col(q) = apply_kinetic(basis.modes[q]).values + v.cast<cplx>().cwiseProduct(phi.col(q));
    }
    const Eigen::VectorXd rho = xi.values.cwiseAbs2();
    const Eigen::VectorXcd f_weight = ((2.0 * u_tilde * rho.array() - mu) * dx).matrix().cast<cplx>();
    const Eigen::VectorXcd g_weight = (u_tilde * dx) * xi.values.array().square().matrix();

    QuadraticHamiltonian qh;
    Eigen::MatrixXcd l = dx * (phi.adjoint() * h0phi);
    qh.l_matrix = 0.5 * (l + l.adjoint());
    Eigen::MatrixXcd f = phi.adjoint() * f_weight.asDiagonal() * phi;
    qh.f_matrix = 0.5 * (f + f.adjoint());
    qh.m_matrix = qh.l_matrix + qh.f_matrix;
    Eigen::MatrixXcd g = phi.adjoint() * g_weight.asDiagonal() * phi.conjugate();
    qh.g_matrix = 0.5 * (g + g.transpose());
    qh.e3 = -0.5 * u_tilde * rho.squaredNorm() * dx;
    qh.mu = mu;
    return qh;
}

QuasiparticleSpectrum diagonalize(const QuadraticHamiltonian& qh) {
    const int k = qh.size();
    if (k == 0) throw DimensionError("empty quadratic Hamiltonian");
    const Eigen::MatrixXcd h = bdg_form(qh);

    std::vector<Branch> branches;
    QuasiparticleSpectrum sp;
    if (solve_cholesky(h, k, branches)) {
        sp.method = "symplectic-cholesky";
    } else {
        branches.clear();
        solve_general(h, k, branches);
        sp.method = "non-hermitian";
    }
    std::stable_sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) {
        return a.eps.real() < b.eps.real();
    });

    sp.energies.resize(k);
    sp.imag_parts.resize(k);
    sp.c_matrix.resize(k, k);
    sp.s_matrix.resize(k, k);
    for (int m = 0; m < k; ++m) {
        sp.energies[m] = branches[m].eps.real();
        sp.imag_parts[m] = branches[m].eps.imag();
        sp.c_matrix.col(m) = branches[m].w.head(k);
        sp.s_matrix.col(m) = branches[m].w.tail(k).conjugate();
        if (branches[m].anomalous) sp.anomalous_modes.push_back(m);
    }
    sp.omega_g = qh.e3 + 0.5 * (sp.energies.sum() - qh.m_matrix.trace().real());
    sp.stable = check_stability(sp).stable;
    return sp;
}

QuasiparticleSpectrum diagonalize(const QuadraticHamiltonian& qh, const PhononBasis& basis) {
    if (basis.size() != qh.size())
        throw DimensionError("quadratic Hamiltonian and phonon basis sizes differ");
    QuasiparticleSpectrum sp = diagonalize(qh);
    const Eigen::MatrixXcd phi = basis.matrix();
    const Eigen::MatrixXcd p = phi * sp.c_matrix;
    const Eigen::MatrixXcd q = phi * sp.s_matrix;
    const GridPtr& grid = basis.condensate.grid;
    for (int m = 0; m < sp.size(); ++m) {
        sp.p_waves.emplace_back(grid, p.col(m));
        sp.q_waves.emplace_back(grid, q.col(m));
    }
    return sp;
}

StabilityReport check_stability(const QuasiparticleSpectrum& sp) {
    StabilityReport r;
    for (int m = 0; m < sp.size(); ++m) {
        const bool complex_mode = std::abs(sp.imag_parts[m]) > kStabilityTol;
        const bool negative = sp.energies[m] < -kStabilityTol;
        if (complex_mode || negative) {
            r.offending_modes.push_back(m + 1);
            if (!r.message.empty()) r.message += "; ";
            r.message += "mode " + std::to_string(m + 1) + ": eps = " + std::to_string(sp.energies[m]) +
                         (complex_mode ? " + " + std::to_string(sp.imag_parts[m]) + "i" : "");
        }
    }
    r.stable = r.offending_modes.empty();
    if (r.stable) r.message = "all quasiparticle energies real and nonnegative";
    return r;
}

double h3_expectation(const QuadraticHamiltonian& qh, const Eigen::VectorXd& occupations) {
    if (occupations.size() != qh.size())
        throw DimensionError("occupation vector has " + std::to_string(occupations.size()) +
                             " entries for " + std::to_string(qh.size()) + " modes");
    if ((occupations.array() < 0.0).any()) throw DomainError("occupations must be nonnegative");
    const QuasiparticleSpectrum sp = diagonalize(qh);
    return sp.omega_g + occupations.dot(sp.energies);
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> reconstruct_quadratic(const QuasiparticleSpectrum& sp) {
    const int k = sp.size();
    Eigen::MatrixXcd t(2 * k, 2 * k);
    t.topLeftCorner(k, k) = sp.c_matrix;
    t.topRightCorner(k, k) = sp.s_matrix;
    t.bottomLeftCorner(k, k) = sp.s_matrix.conjugate();
    t.bottomRightCorner(k, k) = sp.c_matrix.conjugate();
    Eigen::VectorXcd d(2 * k);
    d.head(k) = sp.energies.cast<cplx>();
    d.tail(k) = sp.energies.cast<cplx>();
    const Eigen::MatrixXcd sz = sigma_z(k);
    // T^{-1} = sigma T^+ sigma, hence H = sigma T sigma D sigma T^+ sigma.
    const Eigen::MatrixXcd h = sz * t * sz * d.asDiagonal() * sz * t.adjoint() * sz;
    return {h.topLeftCorner(k, k), h.topRightCorner(k, k)};
}

double symplectic_deviation(const QuasiparticleSpectrum& sp) {
    const int k = sp.size();
    const Eigen::MatrixXcd g = sp.c_matrix.adjoint() * sp.c_matrix - sp.s_matrix.adjoint() * sp.s_matrix;
    return (g - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
}

int parity(const ComplexField& f) {
    const double n2 = f.values.squaredNorm();
    if (n2 == 0.0) return 0;
    const double ov = f.values.dot(reflect(f).values).real() / n2;
    if (ov > 1.0 - 1e-6) return +1;
    if (ov < -1.0 + 1e-6) return -1;
    return 0;
}

int mode_parity(const QuasiparticleSpectrum& sp, int m) {
    if (m < 0 || m >= static_cast<int>(sp.p_waves.size()))
        throw DimensionError("mode index out of range or spectrum has no wavefunctions");
    ComplexField combined = sp.p_waves[m];
    const ComplexField& q = sp.q_waves[m];
    // Parity of the pair (p, q): both components must share it.
    const int pp = parity(combined);
    const int pq = q.values.squaredNorm() > 1e-20 * combined.values.squaredNorm() ? parity(q) : pp;
    return pp == pq ? pp : 0;
}

} // namespace ncbogo
