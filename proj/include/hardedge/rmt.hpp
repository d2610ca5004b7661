#pragma once

// Matrix-model sampling (GUE, complex Ginibre, the product G(H - n x)G*) and
// Hermitian eigenvalues.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hardedge/errors.hpp"

namespace hardedge {

/// Philox4x32-10 counter-based generator. The key is the seed, the upper
/// half of the counter is the stream index, so every (seed, stream) pair owns
/// an independent sequence.
class Philox4x32 {
public:
    using block = std::array<std::uint32_t, 4>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_{0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)} {}

    static block encrypt(block x, std::array<std::uint32_t, 2> k) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * x[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * x[2];
            x = {static_cast<std::uint32_t>(p1 >> 32) ^ x[1] ^ k[0], static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ x[3] ^ k[1], static_cast<std::uint32_t>(p0)};
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        return x;
    }

    std::uint32_t next_u32() {
        if (used_ == 4) refill();
        return buffer_[used_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(phi);
        has_spare_ = true;
        return r * std::cos(phi);
    }

private:
    void refill() {
        buffer_ = encrypt(counter_, key_);
        used_ = 0;
        if (++counter_[0] == 0) ++counter_[1];
    }

    std::array<std::uint32_t, 2> key_;
    block counter_;
    block buffer_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    Philox4x32 engine() const { return Philox4x32(seed, stream); }
};

enum class Ensemble { gue, ginibre_squared, product };

inline std::string to_string(Ensemble e) {
    switch (e) {
        case Ensemble::gue: return "gue";
        case Ensemble::ginibre_squared: return "ginibre-squared";
        case Ensemble::product: return "product";
    }
    return "unknown";
}

struct SpectralSample {
    std::vector<double> eigenvalues;  // ascending
    int n = 0;
    double x = 0.0;
    Ensemble ensemble = Ensemble::gue;
    RngState seed_info;
};

/// GUE with density proportional to exp(-tr H^2 / (2n)): diagonal variance n,
/// off-diagonal real and imaginary parts of variance n/2.
inline Eigen::MatrixXcd sample_gue(int n, Philox4x32& rng) {
    if (n < 1) throw std::invalid_argument("sample_gue: n must be positive");
    Eigen::MatrixXcd h(n, n);
    const double sd_diag = std::sqrt(static_cast<double>(n));
    const double sd_off = std::sqrt(0.5 * n);
    for (int i = 0; i < n; ++i) {
        h(i, i) = sd_diag * rng.normal();
        for (int j = i + 1; j < n; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            h(i, j) = std::complex<double>(sd_off * re, sd_off * im);
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

inline Eigen::MatrixXcd sample_gue(int n, const RngState& state) {
    Philox4x32 rng = state.engine();
    return sample_gue(n, rng);
}

/// Complex Ginibre matrix, entries with independent real and imaginary parts
/// of variance 1/2 (E|g|^2 = 1).
inline Eigen::MatrixXcd sample_ginibre(int n, Philox4x32& rng) {
    if (n < 1) throw std::invalid_argument("sample_ginibre: n must be positive");
    Eigen::MatrixXcd g(n, n);
    const double sd = std::sqrt(0.5);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(i, j) = std::complex<double>(sd * re, sd * im);
        }
    return g;
}

inline Eigen::MatrixXcd sample_ginibre(int n, const RngState& state) {
    Philox4x32 rng = state.engine();
    return sample_ginibre(n, rng);
}

/// W = G (H - n x 1) G*, symmetrized as (W + W*)/2.
inline Eigen::MatrixXcd build_product(const Eigen::MatrixXcd& g, const Eigen::MatrixXcd& h, double x, int n) {
    if (g.rows() != n || g.cols() != n || h.rows() != n || h.cols() != n)
        throw std::invalid_argument("build_product: dimension mismatch");
    Eigen::MatrixXcd shifted = h;
    shifted.diagonal().array() -= static_cast<double>(n) * x;
    Eigen::MatrixXcd left(n, n);
    left.noalias() = g * shifted;
    Eigen::MatrixXcd w(n, n);
    w.noalias() = left * g.adjoint();
    return 0.5 * (w + w.adjoint());
}

/// All eigenvalues of a Hermitian matrix in ascending order (Householder
/// tridiagonalization followed by implicit symmetric QR).
inline std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw convergence_error("hermitian_eigenvalues: QR iteration did not converge");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
}

/// One spectrum of the requested ensemble; the Ginibre factor is drawn before
/// the GUE factor from the same stream.
inline SpectralSample sample_spectrum(Ensemble ensemble, int n, double x, const RngState& state) {
    Philox4x32 rng = state.engine();
    SpectralSample s;
    s.n = n;
    s.x = x;
    s.ensemble = ensemble;
    s.seed_info = state;
    switch (ensemble) {
        case Ensemble::gue:
            s.eigenvalues = hermitian_eigenvalues(sample_gue(n, rng));
            break;
        case Ensemble::ginibre_squared: {
            const Eigen::MatrixXcd g = sample_ginibre(n, rng);
            Eigen::MatrixXcd gg(n, n);
            gg.noalias() = g * g.adjoint();
            s.eigenvalues = hermitian_eigenvalues(0.5 * (gg + gg.adjoint()));
            break;
        }
        case Ensemble::product: {
            const Eigen::MatrixXcd g = sample_ginibre(n, rng);
            const Eigen::MatrixXcd h = sample_gue(n, rng);
            s.eigenvalues = hermitian_eigenvalues(build_product(g, h, x, n));
            break;
        }
    }
    return s;
}

}  // namespace hardedge
