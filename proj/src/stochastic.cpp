#include "fracheat/stochastic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "fftw_lock.hpp"
#include "fracheat/errors.hpp"
#include "fracheat/mildness.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/random.hpp"
#include "fracheat/specfun.hpp"

namespace fracheat::stochastic {

namespace {

constexpr std::size_t kMemoryBudget = std::size_t{1} << 30;
constexpr int kLagBlock = 8;
constexpr double kLagShareWarning = 0.05;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t ipow(std::size_t b, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

RealBuffer real_buffer(std::size_t n) {
    return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer complex_buffer(std::size_t n) {
    return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

}  // namespace

void LatticeSpec::validate() const {
    if (d != 1 && d != 2) throw DomainError("lattice.d must be 1 or 2");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw DomainError("lattice.t_final must be positive");
    if (n_t < 8) throw DomainError("lattice.n_t must be at least 8");
    if (!(domain_half_width > 0.0) || !std::isfinite(domain_half_width))
        throw DomainError("lattice.domain_half_width must be positive");
    if (n_x < 32 || !is_power_of_two(n_x))
        throw DomainError("lattice.n_x must be a power of two >= 32");
    const double bytes = 8.0 * n_t * static_cast<double>(cells());
    if (bytes > static_cast<double>(kMemoryBudget))
        throw DomainError("lattice needs more than the 1 GiB noise budget");
}

std::size_t LatticeSpec::cells() const { return ipow(static_cast<std::size_t>(n_x), d); }

std::vector<double> white_noise_increments(const LatticeSpec& lattice, std::uint64_t seed,
                                           std::uint64_t sample) {
    lattice.validate();
    const std::size_t total = static_cast<std::size_t>(lattice.n_t) * lattice.cells();
    const double sd = std::sqrt(lattice.dt() * std::pow(lattice.dx(), lattice.d));
    std::vector<double> out(total);
    for (std::size_t k = 0; k < total; ++k) out[k] = sd * random::standard_normal(seed, sample, k);
    return out;
}

std::vector<double> sample_brownian_sheet(const LatticeSpec& lattice, std::uint64_t seed,
                                          std::uint64_t sample) {
    const auto inc = white_noise_increments(lattice, seed, sample);
    const int d = lattice.d;
    const std::size_t n = static_cast<std::size_t>(lattice.n_x);
    const std::size_t m = n + 1;
    const std::size_t nodes_space = ipow(m, d);
    const std::size_t nt = static_cast<std::size_t>(lattice.n_t);
    std::vector<double> sheet((nt + 1) * nodes_space, 0.0);
    // Place each increment at its upper node, then prefix-sum along every axis.
    for (std::size_t j = 0; j < nt; ++j)
        for (std::size_t c = 0; c < lattice.cells(); ++c) {
            std::size_t node = 0;
            std::size_t rest = c;
            std::size_t stride = 1;
            for (int axis = 0; axis < d; ++axis) {
                node += (rest % n + 1) * stride;
                rest /= n;
                stride *= m;
            }
            sheet[(j + 1) * nodes_space + node] = inc[j * lattice.cells() + c];
        }
    // time axis
    for (std::size_t i = 1; i <= nt; ++i)
        for (std::size_t s = 0; s < nodes_space; ++s) sheet[i * nodes_space + s] += sheet[(i - 1) * nodes_space + s];
    // spatial axes
    std::size_t stride = 1;
    for (int axis = 0; axis < d; ++axis) {
        for (std::size_t i = 0; i <= nt; ++i)
            for (std::size_t s = 0; s < nodes_space; ++s) {
                const std::size_t coord = (s / stride) % m;
                if (coord > 0) sheet[i * nodes_space + s] += sheet[i * nodes_space + s - stride];
            }
        stride *= m;
    }
    return sheet;
}

std::vector<double> i1_on_lattice(const kernel::EquationSpec& spec, const LatticeSpec& lattice) {
    spec.validate();
    lattice.validate();
    if (spec.d != lattice.d) throw DomainError("lattice dimension differs from the equation dimension");
    const int n = lattice.n_x;
    const int big = std::max(n, 64);
    const auto grid = transforms::SpectralGrid::for_spatial_half_width(lattice.d, 0.5 * big * lattice.dx(), big);
    const auto field = kernel::i1_field(spec, lattice.t_final, grid);
    const int offset = (big - n) / 2;
    std::vector<double> out(lattice.cells());
    for (std::size_t c = 0; c < out.size(); ++c) {
        std::size_t rest = c;
        std::size_t src = 0;
        std::size_t stride = 1;
        for (int axis = 0; axis < lattice.d; ++axis) {
            src += (rest % static_cast<std::size_t>(n) + static_cast<std::size_t>(offset)) * stride;
            rest /= static_cast<std::size_t>(n);
            stride *= static_cast<std::size_t>(big);
        }
        out[c] = field.values[src];
    }
    return out;
}

struct StochasticConvolution::Impl {
    kernel::EquationSpec spec;
    LatticeSpec lattice;
    int n = 0;            // points per axis
    int padded = 0;       // 2n
    std::size_t real_size = 0;
    std::size_t spectrum_size = 0;
    std::vector<std::uint32_t> key_index;  // spectrum point -> unique |k|^2 slot
    std::size_t unique = 0;
    std::vector<double> table;  // lag-major, unique slots fastest
    std::vector<double> weights;
    std::vector<double> lags;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Impl() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
    }
};

StochasticConvolution::StochasticConvolution(const kernel::EquationSpec& spec, const LatticeSpec& lattice)
    : impl_(std::make_unique<Impl>()) {
    spec.validate();
    lattice.validate();
    if (spec.d != lattice.d) throw DomainError("lattice dimension differs from the equation dimension");
    auto& m = *impl_;
    m.spec = spec;
    m.lattice = lattice;
    m.n = lattice.n_x;
    m.padded = 2 * m.n;
    const int d = lattice.d;
    const std::size_t p = static_cast<std::size_t>(m.padded);
    const std::size_t half = p / 2 + 1;
    m.real_size = ipow(p, d);
    m.spectrum_size = ipow(p, d - 1) * half;

    // Unique squared wave numbers of the half spectrum (last axis halved).
    std::map<long, std::uint32_t> slots;
    std::vector<long> keys(m.spectrum_size);
    for (std::size_t s = 0; s < m.spectrum_size; ++s) {
        long key = 0;
        const long last = static_cast<long>(s % half);
        key += last * last;
        std::size_t rest = s / half;
        for (int axis = 0; axis < d - 1; ++axis) {
            long k = static_cast<long>(rest % p);
            if (k >= static_cast<long>(p / 2)) k -= static_cast<long>(p);
            key += k * k;
            rest /= p;
        }
        keys[s] = key;
        slots.emplace(key, 0);
    }
    std::uint32_t next = 0;
    std::vector<long> unique_keys;
    for (auto& [key, slot] : slots) {
        slot = next++;
        unique_keys.push_back(key);
    }
    m.unique = unique_keys.size();
    m.key_index.resize(m.spectrum_size);
    for (std::size_t s = 0; s < m.spectrum_size; ++s) m.key_index[s] = slots[keys[s]];

    const int nt = lattice.n_t;
    const double dt = lattice.dt();
    const double alpha = spec.alpha;
    m.weights.resize(static_cast<std::size_t>(nt));
    m.lags.resize(static_cast<std::size_t>(nt));
    double total_weight = 0.0;
    for (int j = 0; j < nt; ++j) {
        const double hi = (nt - j) * dt;  // t - r_j
        const double lo = (nt - j - 1) * dt;
        m.weights[static_cast<std::size_t>(j)] = (std::pow(hi, alpha) - std::pow(lo, alpha)) / alpha;
        m.lags[static_cast<std::size_t>(j)] = 0.5 * (hi + lo);
        total_weight += m.weights[static_cast<std::size_t>(j)];
    }
    const double last_share = m.weights.back() / total_weight;
    if (alpha < 1.0 && last_share > kLagShareWarning)
        warnings_.push_back("time-lag singularity (t-r)^(alpha-1) under-resolved: the last time step carries " +
                            std::to_string(100.0 * last_share) + "% of the kernel weight; increase n_t");

    const specfun::MittagLefflerTable e_aa({alpha, alpha});
    const double dy = 2.0 * std::numbers::pi / (static_cast<double>(p) * lattice.dx());
    const double norm = spec.sigma / (std::pow(lattice.dx(), d) * static_cast<double>(m.real_size) * dt);
    m.table.resize(static_cast<std::size_t>(nt) * m.unique);
    parallel_for(static_cast<std::size_t>(nt), 0, [&](std::size_t j, int) {
        const double s = m.lags[j];
        const double scale = spec.lambda * std::pow(s, alpha) * dy * dy;
        const double c = norm * m.weights[j];
        double* row = m.table.data() + j * m.unique;
        for (std::size_t u = 0; u < m.unique; ++u)
            row[u] = c * e_aa(-scale * static_cast<double>(unique_keys[u]));
    });

    auto in = real_buffer(m.real_size);
    auto out = complex_buffer(m.spectrum_size);
    std::vector<int> dims(static_cast<std::size_t>(d), m.padded);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        m.forward = fftw_plan_dft_r2c(d, dims.data(), in.get(), out.get(), FFTW_ESTIMATE);
        m.backward = fftw_plan_dft_c2r(d, dims.data(), out.get(), in.get(), FFTW_ESTIMATE);
    }
    if (!m.forward || !m.backward) throw Error("FFTW planning failed");
}

StochasticConvolution::~StochasticConvolution() = default;

double StochasticConvolution::time_weight(int j) const { return impl_->weights.at(static_cast<std::size_t>(j)); }
double StochasticConvolution::lag(int j) const { return impl_->lags.at(static_cast<std::size_t>(j)); }

std::vector<double> StochasticConvolution::apply(const std::vector<double>& increments, int workers) const {
    const auto& m = *impl_;
    const std::size_t cells = m.lattice.cells();
    const std::size_t nt = static_cast<std::size_t>(m.lattice.n_t);
    if (increments.size() != nt * cells) throw DomainError("increment array has the wrong size");
    const int d = m.lattice.d;
    const std::size_t n = static_cast<std::size_t>(m.n);
    const std::size_t p = static_cast<std::size_t>(m.padded);

    // Offset of lattice cell c inside the padded array.
    std::vector<std::size_t> place(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        std::size_t dst = 0;
        std::size_t stride = 1;
        for (int axis = 0; axis < d; ++axis) {
            dst += (rest % n) * stride;
            rest /= n;
            stride *= p;
        }
        place[c] = dst;
    }

    const std::size_t blocks = (nt + kLagBlock - 1) / kLagBlock;
    std::vector<std::vector<std::complex<double>>> partial(blocks);
    parallel_for(blocks, workers, [&](std::size_t b, int) {
        auto in = real_buffer(m.real_size);
        auto out = complex_buffer(m.spectrum_size);
        auto& acc = partial[b];
        acc.assign(m.spectrum_size, {0.0, 0.0});
        const std::size_t j_end = std::min(nt, (b + 1) * kLagBlock);
        for (std::size_t j = b * kLagBlock; j < j_end; ++j) {
            std::memset(in.get(), 0, sizeof(double) * m.real_size);
            const double* src = increments.data() + j * cells;
            for (std::size_t c = 0; c < cells; ++c) in[place[c]] = src[c];
            fftw_execute_dft_r2c(m.forward, in.get(), out.get());
            const double* row = m.table.data() + j * m.unique;
            for (std::size_t s = 0; s < m.spectrum_size; ++s) {
                const double w = row[m.key_index[s]];
                acc[s] += std::complex<double>(w * out[s][0], w * out[s][1]);
            }
        }
    });

    auto spectrum = complex_buffer(m.spectrum_size);
    for (std::size_t s = 0; s < m.spectrum_size; ++s) {
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t b = 0; b < blocks; ++b) sum += partial[b][s];
        spectrum[s][0] = sum.real();
        spectrum[s][1] = sum.imag();
    }
    auto field = real_buffer(m.real_size);
    fftw_execute_dft_c2r(m.backward, spectrum.get(), field.get());
    std::vector<double> result(cells);
    for (std::size_t c = 0; c < cells; ++c) result[c] = field[place[c]];
    return result;
}

std::vector<double> StochasticConvolution::point_weights(const std::vector<int>& node) const {
    const auto& m = *impl_;
    const int d = m.lattice.d;
    if (static_cast<int>(node.size()) != d) throw DomainError("node has the wrong dimension");
    for (int v : node)
        if (v < 0 || v >= m.n) throw DomainError("node outside the lattice");
    const std::size_t cells = m.lattice.cells();
    const std::size_t nt = static_cast<std::size_t>(m.lattice.n_t);
    const std::size_t n = static_cast<std::size_t>(m.n);
    const std::size_t p = static_cast<std::size_t>(m.padded);

    // Padded offset of (node - z) mod p for every cell z.
    std::vector<std::size_t> offset(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rest = c;
        std::size_t idx = 0;
        std::size_t stride = 1;
        // cell index c has the last axis fastest; node[axis] follows the same order
        for (int axis = d - 1; axis >= 0; --axis) {
            const std::size_t z = rest % n;
            rest /= n;
            const std::size_t diff = (static_cast<std::size_t>(node[static_cast<std::size_t>(axis)]) + p - z) % p;
            idx += diff * stride;
            stride *= p;
        }
        offset[c] = idx;
    }

    std::vector<double> out(nt * cells);
    auto spectrum = complex_buffer(m.spectrum_size);
    auto kernel = real_buffer(m.real_size);
    for (std::size_t j = 0; j < nt; ++j) {
        const double* row = m.table.data() + j * m.unique;
        for (std::size_t s = 0; s < m.spectrum_size; ++s) {
            spectrum[s][0] = row[m.key_index[s]];
            spectrum[s][1] = 0.0;
        }
        fftw_execute_dft_c2r(m.backward, spectrum.get(), kernel.get());
        for (std::size_t c = 0; c < cells; ++c) out[j * cells + c] = kernel[offset[c]];
    }
    return out;
}

FieldSample simulate_field(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                           std::uint64_t seed, const SimulationOptions& options) {
    FieldSample out;
    out.spec = spec;
    out.lattice = lattice;
    out.seed = seed;
    out.i1_part = i1_on_lattice(spec, lattice);
    if (spec.sigma == 0.0) {
        out.i2_part.assign(out.i1_part.size(), 0.0);
    } else {
        const StochasticConvolution conv(spec, lattice);
        out.warnings = conv.warnings();
        const std::size_t cells = lattice.cells();
        const std::size_t nt = static_cast<std::size_t>(lattice.n_t);
        const double sd = std::sqrt(lattice.dt() * std::pow(lattice.dx(), lattice.d));
        std::vector<double> noise(nt * cells);
        parallel_for(nt, options.workers, [&](std::size_t j, int) {
            for (std::size_t c = 0; c < cells; ++c) {
                const std::size_t k = j * cells + c;
                noise[k] = sd * random::standard_normal(seed, 0, k);
            }
        });
        out.i2_part = conv.apply(noise, options.workers);
    }
    out.values.resize(out.i1_part.size());
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = out.i1_part[i] + out.i2_part[i];
    return out;
}

VarianceEstimate summarize(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw DomainError("at least two samples are needed");
    VarianceEstimate e;
    e.n_samples = static_cast<int>(n);
    // shifted by the first sample so that constant data has zero spread exactly
    const double shift = samples.front();
    double sum = 0.0;
    for (double v : samples) sum += v - shift;
    const double offset = sum / static_cast<double>(n);
    e.mean = shift + offset;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double v : samples) {
        const double c = (v - shift) - offset;
        m2 += c * c;
        m4 += c * c * c * c;
    }
    const double nd = static_cast<double>(n);
    e.variance = m2 / (nd - 1.0);
    m4 /= nd;
    const double s4 = e.variance * e.variance;
    e.std_error_of_variance = std::sqrt(std::max(0.0, m4 - (nd - 3.0) / (nd - 1.0) * s4) / nd);
    return e;
}

namespace {

std::vector<int> node_of(const LatticeSpec& lattice, const std::vector<double>& point) {
    if (static_cast<int>(point.size()) != lattice.d) throw DomainError("point has the wrong dimension");
    std::vector<int> node;
    for (double x : point) {
        const double u = x / lattice.dx() + lattice.n_x / 2;
        const long m = std::lround(u);
        if (m < 0 || m >= lattice.n_x || std::abs(u - static_cast<double>(m)) > 1e-9)
            throw DomainError("point " + std::to_string(x) + " is not a lattice node");
        node.push_back(static_cast<int>(m));
    }
    return node;
}

std::size_t flat_index(const LatticeSpec& lattice, const std::vector<int>& node) {
    std::size_t flat = 0;
    for (int v : node) flat = flat * static_cast<std::size_t>(lattice.n_x) + static_cast<std::size_t>(v);
    return flat;
}

}  // namespace

namespace {

std::vector<double> point_samples(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                                  const std::vector<double>& point, int n_samples, std::uint64_t seed,
                                  const SimulationOptions& options, std::vector<std::string>& warnings) {
    spec.validate();
    lattice.validate();
    if (n_samples < 1) throw DomainError("n_samples must be positive");
    const auto node = node_of(lattice, point);
    const double i1 = i1_on_lattice(spec, lattice)[flat_index(lattice, node)];
    std::vector<double> values(static_cast<std::size_t>(n_samples), i1);
    if (spec.sigma == 0.0) return values;
    const StochasticConvolution conv(spec, lattice);
    warnings = conv.warnings();
    const auto weights = conv.point_weights(node);
    const double sd = std::sqrt(lattice.dt() * std::pow(lattice.dx(), lattice.d));
    parallel_for(values.size(), options.workers, [&](std::size_t s, int) {
        double acc = 0.0;
        for (std::size_t k = 0; k < weights.size(); ++k)
            acc += weights[k] * random::standard_normal(seed, s, k);
        values[s] = i1 + sd * acc;
    });
    return values;
}

}  // namespace

std::vector<double> sample_point_values(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                                        const std::vector<double>& point, int n_samples,
                                        std::uint64_t seed, const SimulationOptions& options) {
    std::vector<std::string> warnings;
    return point_samples(spec, lattice, point, n_samples, seed, options, warnings);
}

VarianceEstimate estimate_moments(const kernel::EquationSpec& spec, const LatticeSpec& lattice,
                                  const std::vector<double>& point, int n_samples,
                                  std::uint64_t seed, const SimulationOptions& options) {
    if (n_samples < 100) throw DomainError("n_samples must be at least 100");
    std::vector<std::string> warnings;
    auto e = summarize(point_samples(spec, lattice, point, n_samples, seed, options, warnings));
    const auto verdict = mildness::classify(spec.alpha, spec.d);
    if (verdict.status != mildness::Status::Mild)
        e.warnings.push_back("divergence warning: the solution is classified " + mildness::to_string(verdict.status) +
                             "; the lattice variance does not converge under refinement");
    for (const auto& w : warnings) e.warnings.push_back(w);
    return e;
}

}  // namespace fracheat::stochastic
