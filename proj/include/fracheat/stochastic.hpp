#pragma once

// Lattice white noise, the Brownian sheet, and Monte-Carlo simulation of
// Y = I1 + I2 with
//   I2(t, x) = sigma int_0^t int G(t - r, x - z) B(dr, dz),
//   G(s, u) = (2 pi)^{-d} s^{alpha-1} int e^{iuy} E_{alpha,alpha}(-lambda s^alpha |y|^2) dy.
//
// Time cell [r_j, r_j + dt] contributes its exact weight
// int (t - r)^{alpha-1} dr times the spatial kernel at the midpoint lag; the
// spatial convolution runs on a zero-padded 2 n_x grid in Fourier space.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fracheat/kernel.hpp"
#include "fracheat/transforms.hpp"

namespace fracheat::stochastic {

/// Time steps r_j = j dt on [0, t_final]; spatial nodes x_m = (m - n_x/2) dx,
/// dx = 2 domain_half_width / n_x, each the centre of one noise cell.
struct LatticeSpec {
    int d = 1;
    double t_final = 1.0;
    int n_t = 256;
    double domain_half_width = 8.0;
    int n_x = 256;  // power of two

    void validate() const;
    [[nodiscard]] double dt() const { return t_final / n_t; }
    [[nodiscard]] double dx() const { return 2.0 * domain_half_width / n_x; }
    [[nodiscard]] std::size_t cells() const;  // n_x^d
    [[nodiscard]] double coordinate(int m) const { return (m - n_x / 2) * dx(); }
};

/// Increments Delta B over (time step j, spatial cell c), index j * cells() + c.
/// Independent N(0, dt dx^d), determined by (seed, sample).
std::vector<double> white_noise_increments(const LatticeSpec& lattice, std::uint64_t seed,
                                           std::uint64_t sample = 0);

/// Brownian sheet on the nodes (i dt, m_1 dx, ..., m_d dx), i in [0, n_t],
/// m in [0, n_x]: cumulative sums of the increments, zero on the axes.
/// Row-major, time slowest.
std::vector<double> sample_brownian_sheet(const LatticeSpec& lattice, std::uint64_t seed,
                                          std::uint64_t sample = 0);

/// I1(t_final, .) on the lattice nodes.
std::vector<double> i1_on_lattice(const kernel::EquationSpec& spec, const LatticeSpec& lattice);

struct SimulationOptions {
    int workers = 0;  // 0: hardware concurrency
};

struct FieldSample {
    kernel::EquationSpec spec;
    LatticeSpec lattice;
    std::uint64_t seed = 0;
    std::uint64_t sample = 0;
    std::vector<double> values;  // i1_part + i2_part
    std::vector<double> i1_part;
    std::vector<double> i2_part;
    std::vector<std::string> warnings;
};

/// Precomputed per-lag Fourier symbols of the stochastic convolution. Immutable
/// after construction and safe to share between threads.
class StochasticConvolution {
public:
    StochasticConvolution(const kernel::EquationSpec& spec, const LatticeSpec& lattice);
    ~StochasticConvolution();
    StochasticConvolution(const StochasticConvolution&) = delete;
    StochasticConvolution& operator=(const StochasticConvolution&) = delete;

    /// I2 on the lattice nodes for the given increments. Lags are summed in
    /// fixed blocks and the blocks in order, so the result does not depend on
    /// `workers`.
    [[nodiscard]] std::vector<double> apply(const std::vector<double>& increments, int workers = 1) const;

    /// Coefficients c with I2(x_node) = sum_k c[k] increments[k].
    [[nodiscard]] std::vector<double> point_weights(const std::vector<int>& node) const;

    /// Time weight int_{cell j} (t - r)^{alpha-1} dr and midpoint lag.
    [[nodiscard]] double time_weight(int j) const;
    [[nodiscard]] double lag(int j) const;

    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<std::string> warnings_;
};

FieldSample simulate_field(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                           std::uint64_t seed, const SimulationOptions& options = {});

struct VarianceEstimate {
    double mean = 0.0;
    double variance = 0.0;  // unbiased sample variance
    double std_error_of_variance = 0.0;
    int n_samples = 0;
    std::vector<std::string> warnings;
};

/// Sample statistics in index order; SE of the variance from the fourth
/// central moment, sqrt((m4 - (n-3)/(n-1) s^4) / n).
VarianceEstimate summarize(const std::vector<double>& samples);

/// Relative lattice bias of the Monte-Carlo variance accepted against the
/// exact value (time midpoint rule on the lag singularity and the band
/// limit pi/dx both bias the lattice variance low).
inline constexpr double kLatticeBiasBudget = 0.05;

/// Y(t_final, point) over samples 0..n_samples-1 of `seed`. `point` must be a
/// lattice node. n_samples >= 100.
VarianceEstimate estimate_moments(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                                  const std::vector<double>& point, int n_samples,
                                  std::uint64_t seed, const SimulationOptions& options = {});

/// Per-sample values of Y(t_final, point), in sample order.
std::vector<double> sample_point_values(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                                        const std::vector<double>& point, int n_samples,
                                        std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace fracheat::stochastic
