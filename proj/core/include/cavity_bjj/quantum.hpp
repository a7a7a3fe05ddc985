#pragma once

// Exact evolution of the two-mode Bose-Hubbard junction coupled to a driven
// cavity mode in a truncated Fock space {|n1, m>}, n2 = N - n1, m <= M:
//
//   H = -d_c m - i e (a - a^dag) + w0 m - (1 - (w12/N) m)(b1^dag b2 + h.c.)
//       + (u / 2N) [n1(n1-1) + n2(n2-1)]
//
// in units of J, with the same dimensionless couplings as the mean-field code.

#include "cavity_bjj/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <vector>

namespace cavity_bjj {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using SparseHamiltonian = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

class FockBasis {
public:
    static constexpr std::size_t default_limit = 2'000'000;

    /// Throws DomainError for n_atoms < 1, cutoff < 0 or a dimension above `limit`.
    FockBasis(int n_atoms, int photon_cutoff, std::size_t limit = default_limit);

    int n_atoms() const noexcept { return n_atoms_; }
    int photon_cutoff() const noexcept { return cutoff_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(n_atoms_ + 1) * (cutoff_ + 1); }

    std::size_t index(int n1, int m) const;
    int n1_of(std::size_t index) const { return static_cast<int>(index / (cutoff_ + 1)); }
    int photons_of(std::size_t index) const { return static_cast<int>(index % (cutoff_ + 1)); }

private:
    int n_atoms_;
    int cutoff_;
};

struct HamiltonianMatrix {
    FockBasis basis;
    DimensionlessParams params;
    SparseHamiltonian matrix;
};

/// params.n_atoms is replaced by basis.n_atoms() in the couplings.
HamiltonianMatrix build_hamiltonian(const DimensionlessParams& params, const FockBasis& basis);

/// max |H_ij - conj(H_ji)|.
double hermiticity_error(const SparseHamiltonian& h);

/// Largest |H_ij| over entries connecting different total atom numbers.
/// Always zero because the basis fixes n1 + n2 = N; kept as an explicit check.
double atom_number_leakage(const HamiltonianMatrix& h);

struct QuantumState {
    ComplexVector amplitudes;
    double norm = 1.0;
};

/// Population in the m = M layer; zero when M = 0 (no photon space to leak from).
double edge_population(const QuantumState& state, const FockBasis& basis);

/// Atomic SU(2) coherent state with <z> = z, arg<b1^dag b2> = theta, times a
/// photon coherent state of amplitude xi e^{i phi} truncated at M and
/// renormalised. Throws CutoffError when the edge population exceeds
/// `leak_threshold`.
QuantumState coherent_initial_state(double z, double theta, double xi, double phi, const FockBasis& basis,
                                    double leak_threshold = 1e-8);

struct EvolveOptions {
    double tolerance = 1e-10;   ///< Krylov error bound per step
    int krylov_dimension = 30;
    std::size_t max_steps = 10'000'000;
};

struct EvolveStatistics {
    std::size_t steps = 0;
    std::size_t matvecs = 0;
};

/// exp(-i H duration) state via Lanczos with full reorthogonalisation and
/// step halving until the a-posteriori error estimate meets the tolerance.
QuantumState evolve(const QuantumState& state, const HamiltonianMatrix& h, double duration,
                    const EvolveOptions& options = {}, EvolveStatistics* stats = nullptr);

struct Expectations {
    double z = 0.0;
    double relative_phase = 0.0;  ///< arg <b1^dag b2>
    Complex coherence{};          ///< <b1^dag b2>
    double photon_number = 0.0;
    Complex field{};              ///< <a>
    Complex energy{};             ///< <H>
    double atom_number = 0.0;
    double z_variance = 0.0;
    double photon_variance = 0.0;
};

Expectations expectations(const QuantumState& state, const HamiltonianMatrix& h);

struct DeviationSample {
    double tau = 0.0;
    double z_quantum = 0.0;
    double z_meanfield = 0.0;
    double photons_quantum = 0.0;
    double photons_meanfield = 0.0;
    double norm = 1.0;
    double energy_quantum = 0.0;
};

struct MeanFieldComparison {
    std::vector<DeviationSample> samples;
    double max_z_deviation = 0.0;
    double max_photon_deviation = 0.0;
    double deviation_time = 0.0;   ///< first tau with |dz| > 0.1; horizon when never reached
    bool deviation_reached = false;
    double max_edge_population = 0.0;
};

/// Quantum vs mean-field evolution from the same coherent initial state. The
/// mean-field run uses `params` with n_atoms replaced by `n_atoms`.
MeanFieldComparison compare_meanfield(const DimensionlessParams& params, const MeanFieldState& initial,
                                      int n_atoms, int photon_cutoff, double horizon, double stride = 0.1,
                                      const EvolveOptions& options = {});

/// Default cutoff max(20, ceil(8 xi^2)).
int default_photon_cutoff(double expected_photons);

} // namespace cavity_bjj
