#include "cavity_bjj/quantum.hpp"

#include "cavity_bjj/dynamics.hpp"
#include "cavity_bjj/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace cavity_bjj {

FockBasis::FockBasis(int n_atoms, int photon_cutoff, std::size_t limit) : n_atoms_(n_atoms), cutoff_(photon_cutoff) {
    if (n_atoms < 1) throw DomainError("Fock basis needs n_atoms >= 1");
    if (photon_cutoff < 0) throw DomainError("photon cutoff must be >= 0");
    if (dimension() > limit) {
        throw DomainError("Fock basis dimension " + std::to_string(dimension()) + " exceeds limit " +
                          std::to_string(limit));
    }
}

std::size_t FockBasis::index(int n1, int m) const {
    if (n1 < 0 || n1 > n_atoms_ || m < 0 || m > cutoff_) throw DomainError("Fock index out of range");
    return static_cast<std::size_t>(n1) * (cutoff_ + 1) + m;
}

HamiltonianMatrix build_hamiltonian(const DimensionlessParams& params, const FockBasis& basis) {
    const int n = basis.n_atoms();
    const int cutoff = basis.photon_cutoff();
    const double per_atom = 1.0 / n;
    std::vector<Eigen::Triplet<Complex>> entries;
    entries.reserve(basis.dimension() * 5);

    for (int n1 = 0; n1 <= n; ++n1) {
        const int n2 = n - n1;
        const double interaction = 0.5 * params.u * per_atom * (n1 * (n1 - 1.0) + n2 * (n2 - 1.0));
        for (int m = 0; m <= cutoff; ++m) {
            const auto row = static_cast<Eigen::Index>(basis.index(n1, m));
            const double diagonal = (-params.d_c + params.w0) * m + interaction;
            if (diagonal != 0.0) entries.emplace_back(row, row, Complex(diagonal, 0.0));

            // -(1 - w12 m / N)(b1^dag b2 + b2^dag b1)
            const double hop = -(1.0 - params.w12 * per_atom * m);
            if (n2 > 0 && hop != 0.0) {
                const auto col = static_cast<Eigen::Index>(basis.index(n1 + 1, m));
                const double amp = hop * std::sqrt((n1 + 1.0) * n2);
                entries.emplace_back(col, row, Complex(amp, 0.0));
                entries.emplace_back(row, col, Complex(amp, 0.0));
            }
            // -i e (a - a^dag): <m-1|H|m> = -i e sqrt(m), <m|H|m-1> = +i e sqrt(m)
            if (m > 0 && params.e != 0.0) {
                const auto lower = static_cast<Eigen::Index>(basis.index(n1, m - 1));
                const double amp = params.e * std::sqrt(static_cast<double>(m));
                entries.emplace_back(lower, row, Complex(0.0, -amp));
                entries.emplace_back(row, lower, Complex(0.0, amp));
            }
        }
    }

    const auto dim = static_cast<Eigen::Index>(basis.dimension());
    SparseHamiltonian matrix(dim, dim);
    matrix.setFromTriplets(entries.begin(), entries.end());
    matrix.makeCompressed();
    return {basis, params, std::move(matrix)};
}

double hermiticity_error(const SparseHamiltonian& h) {
    const SparseHamiltonian adjoint = h.adjoint();
    const SparseHamiltonian diff = h - adjoint;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
        for (SparseHamiltonian::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

double atom_number_leakage(const HamiltonianMatrix& h) {
    // Every basis state carries n1 + n2 = N; an entry changing the total would
    // have to reference an index outside the basis. Check the index range and
    // the hopping structure (|dn1| <= 1) explicitly.
    double worst = 0.0;
    const auto& basis = h.basis;
    for (Eigen::Index k = 0; k < h.matrix.outerSize(); ++k) {
        for (SparseHamiltonian::InnerIterator it(h.matrix, k); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            const auto c = static_cast<std::size_t>(it.col());
            const bool in_range = r < basis.dimension() && c < basis.dimension();
            const bool local = in_range && std::abs(basis.n1_of(r) - basis.n1_of(c)) <= 1;
            if (!local) worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

double edge_population(const QuantumState& state, const FockBasis& basis) {
    if (basis.photon_cutoff() == 0) return 0.0;
    double p = 0.0;
    for (int n1 = 0; n1 <= basis.n_atoms(); ++n1) {
        p += std::norm(state.amplitudes[static_cast<Eigen::Index>(basis.index(n1, basis.photon_cutoff()))]);
    }
    return p;
}

QuantumState coherent_initial_state(double z, double theta, double xi, double phi, const FockBasis& basis,
                                    double leak_threshold) {
    validate(MeanFieldState{z, theta, xi, phi});
    const int n = basis.n_atoms();
    const int cutoff = basis.photon_cutoff();
    if (cutoff == 0 && xi != 0.0) throw CutoffError("photon cutoff 0 cannot hold a nonzero field; raise cutoff");

    const double p1 = 0.5 * (1.0 + z);
    const double p2 = 0.5 * (1.0 - z);
    std::vector<Complex> atoms(n + 1);
    for (int n1 = 0; n1 <= n; ++n1) {
        const int n2 = n - n1;
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(n1 + 1.0) - std::lgamma(n2 + 1.0);
        double magnitude = 0.0;
        if ((p1 > 0.0 || n1 == 0) && (p2 > 0.0 || n2 == 0)) {
            const double log_mag = 0.5 * log_binom + (n1 > 0 ? 0.5 * n1 * std::log(p1) : 0.0) +
                                   (n2 > 0 ? 0.5 * n2 * std::log(p2) : 0.0);
            magnitude = std::exp(log_mag);
        }
        atoms[n1] = std::polar(magnitude, n2 * theta);
    }

    std::vector<Complex> photons(cutoff + 1);
    const Complex alpha = std::polar(xi, phi);
    double photon_norm = 0.0;
    for (int m = 0; m <= cutoff; ++m) {
        // exp(-|alpha|^2/2) alpha^m / sqrt(m!)
        double magnitude = 0.0;
        if (m == 0) {
            magnitude = std::exp(-0.5 * xi * xi);
        } else if (xi > 0.0) {
            magnitude = std::exp(-0.5 * xi * xi + m * std::log(xi) - 0.5 * std::lgamma(m + 1.0));
        }
        photons[m] = std::polar(magnitude, m * std::arg(alpha));
        photon_norm += magnitude * magnitude;
    }
    for (auto& c : photons) c /= std::sqrt(photon_norm);

    QuantumState state;
    state.amplitudes = ComplexVector::Zero(static_cast<Eigen::Index>(basis.dimension()));
    for (int n1 = 0; n1 <= n; ++n1) {
        for (int m = 0; m <= cutoff; ++m) {
            state.amplitudes[static_cast<Eigen::Index>(basis.index(n1, m))] = atoms[n1] * photons[m];
        }
    }
    state.amplitudes /= state.amplitudes.norm();
    state.norm = state.amplitudes.norm();
    const double leak = edge_population(state, basis);
    if (leak > leak_threshold) {
        throw CutoffError("cutoff too small: population " + std::to_string(leak) + " at m = " +
                          std::to_string(cutoff) + "; raise cutoff");
    }
    return state;
}

namespace {

struct LanczosStep {
    std::vector<ComplexVector> vectors;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double next_beta = 0.0;  ///< residual coupling out of the subspace (0 on breakdown)
};

LanczosStep lanczos(const SparseHamiltonian& h, const ComplexVector& start, int max_dim, std::size_t& matvecs) {
    LanczosStep out;
    const auto dim = std::min<Eigen::Index>(max_dim, start.size());
    std::vector<double> alpha;
    std::vector<double> beta;
    out.vectors.push_back(start);
    for (Eigen::Index j = 0; j < dim; ++j) {
        ComplexVector w = h * out.vectors[j];
        ++matvecs;
        alpha.push_back(out.vectors[j].dot(w).real());
        // Full reorthogonalisation, applied twice for stability.
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : out.vectors) w -= v.dot(w) * v;
        }
        const double b = w.norm();
        const double scale = std::abs(alpha.back()) + (beta.empty() ? 0.0 : beta.back()) + 1.0;
        if (b <= 1e-13 * scale || j + 1 == start.size()) {
            out.next_beta = 0.0;
            break;
        }
        if (j + 1 == dim) {
            out.next_beta = b;
            break;
        }
        beta.push_back(b);
        out.vectors.push_back(w / b);
    }
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    out.vectors.resize(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    return out;
}

// Coefficients of exp(-i T dt) e1 in the Lanczos basis.
Eigen::VectorXcd propagate_small(const LanczosStep& step, double dt) {
    const auto k = step.eigenvalues.size();
    Eigen::VectorXcd weights(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        weights[i] = std::polar(step.eigenvectors(0, i), -step.eigenvalues[i] * dt);
    }
    return step.eigenvectors.cast<Complex>() * weights;
}

} // namespace

QuantumState evolve(const QuantumState& state, const HamiltonianMatrix& h, double duration,
                    const EvolveOptions& options, EvolveStatistics* stats) {
    if (state.amplitudes.size() != h.matrix.rows()) throw DomainError("state and Hamiltonian bases differ");
    if (!std::isfinite(duration)) throw DomainError("evolution duration must be finite");
    EvolveStatistics local;
    QuantumState current = state;
    double elapsed = 0.0;
    double trial = std::abs(duration);
    const double direction = duration < 0.0 ? -1.0 : 1.0;

    while (elapsed < std::abs(duration)) {
        if (local.steps >= options.max_steps) throw Error("Krylov propagator exceeded its step budget");
        const double beta0 = current.amplitudes.norm();
        if (beta0 == 0.0) break;
        const auto step = lanczos(h.matrix, current.amplitudes / beta0, options.krylov_dimension, local.matvecs);
        double dt = std::min(trial, std::abs(duration) - elapsed);
        Eigen::VectorXcd coeffs;
        int halvings = 0;
        while (true) {
            coeffs = propagate_small(step, direction * dt);
            const double error = step.next_beta * std::abs(coeffs[coeffs.size() - 1]) * beta0;
            if (error <= options.tolerance || step.next_beta == 0.0) break;
            dt *= 0.5;
            if (++halvings > 200) throw Error("Krylov propagator failed to converge");
        }
        ComplexVector next = ComplexVector::Zero(current.amplitudes.size());
        for (std::size_t i = 0; i < step.vectors.size(); ++i) {
            next += coeffs[static_cast<Eigen::Index>(i)] * step.vectors[i];
        }
        current.amplitudes = beta0 * next;
        const bool last = std::abs(duration) - elapsed <= dt;
        elapsed = last ? std::abs(duration) : elapsed + dt;
        trial = halvings == 0 ? 2.0 * dt : dt;
        ++local.steps;
    }
    current.norm = current.amplitudes.norm();
    if (stats) *stats = local;
    return current;
}

Expectations expectations(const QuantumState& state, const HamiltonianMatrix& h) {
    const auto& basis = h.basis;
    const auto& psi = state.amplitudes;
    const int n = basis.n_atoms();
    const int cutoff = basis.photon_cutoff();
    Expectations out;
    double z1 = 0.0, z2 = 0.0, m1 = 0.0, m2 = 0.0, total = 0.0;
    for (int n1 = 0; n1 <= n; ++n1) {
        const double z = (2.0 * n1 - n) / n;
        for (int m = 0; m <= cutoff; ++m) {
            const auto idx = static_cast<Eigen::Index>(basis.index(n1, m));
            const double p = std::norm(psi[idx]);
            total += p;
            z1 += p * z;
            z2 += p * z * z;
            m1 += p * m;
            m2 += p * m * m;
            out.atom_number += p * n;
            if (n1 + 1 <= n) {
                const auto up = static_cast<Eigen::Index>(basis.index(n1 + 1, m));
                out.coherence += std::conj(psi[up]) * psi[idx] * std::sqrt((n1 + 1.0) * (n - n1));
            }
            if (m > 0) {
                const auto down = static_cast<Eigen::Index>(basis.index(n1, m - 1));
                out.field += std::conj(psi[down]) * psi[idx] * std::sqrt(static_cast<double>(m));
            }
        }
    }
    out.z = z1 / total;
    out.photon_number = m1 / total;
    out.atom_number /= total;
    out.coherence /= total;
    out.field /= total;
    out.z_variance = z2 / total - out.z * out.z;
    out.photon_variance = m2 / total - out.photon_number * out.photon_number;
    out.relative_phase = std::arg(out.coherence);
    const ComplexVector hpsi = h.matrix * psi;
    out.energy = psi.dot(hpsi) / total;
    return out;
}

MeanFieldComparison compare_meanfield(const DimensionlessParams& params, const MeanFieldState& initial,
                                      int n_atoms, int photon_cutoff, double horizon, double stride,
                                      const EvolveOptions& options) {
    if (n_atoms > 60) throw DomainError("compare_meanfield is meant for n_atoms <= 60");
    if (!(horizon >= 0.0) || !(stride > 0.0)) throw DomainError("horizon must be >= 0 and stride > 0");
    DimensionlessParams small = params;
    small.n_atoms = n_atoms;
    const FockBasis basis(n_atoms, photon_cutoff);
    const auto h = build_hamiltonian(small, basis);
    auto psi = coherent_initial_state(initial.z, initial.theta, initial.xi, initial.phi, basis);

    std::vector<double> taus{0.0};
    std::vector<MeanFieldState> mf{initial};
    if (horizon > 0.0) {
        IntegrationOptions io;
        io.stride = stride;
        const auto traj = integrate(small, initial, horizon, io);
        taus.clear();
        mf.clear();
        for (const auto& s : traj.samples()) {
            taus.push_back(s.tau);
            mf.push_back(s.state);
        }
    }

    MeanFieldComparison out;
    out.deviation_time = horizon;
    double tau = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (taus[i] > tau) {
            psi = evolve(psi, h, taus[i] - tau, options);
            tau = taus[i];
        }
        const double edge = edge_population(psi, basis);
        out.max_edge_population = std::max(out.max_edge_population, edge);
        if (edge > 1e-8) {
            throw CutoffError("cutoff too small: population " + std::to_string(edge) + " at m = " +
                              std::to_string(photon_cutoff) + " at tau = " + std::to_string(tau) +
                              "; raise cutoff");
        }
        const auto ex = expectations(psi, h);
        DeviationSample s{taus[i], ex.z, mf[i].z, ex.photon_number, mf[i].xi * mf[i].xi, psi.amplitudes.norm(),
                          ex.energy.real()};
        const double dz = std::abs(s.z_quantum - s.z_meanfield);
        out.max_z_deviation = std::max(out.max_z_deviation, dz);
        out.max_photon_deviation =
            std::max(out.max_photon_deviation, std::abs(s.photons_quantum - s.photons_meanfield));
        if (!out.deviation_reached && dz > 0.1) {
            out.deviation_reached = true;
            out.deviation_time = s.tau;
        }
        out.samples.push_back(s);
    }
    return out;
}

int default_photon_cutoff(double expected_photons) {
    return std::max(20, static_cast<int>(std::ceil(8.0 * expected_photons)));
}

} // namespace cavity_bjj
