#include "srd/wiener_path.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "srd/error.hpp"
#include "srd/random.hpp"

namespace srd {

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) {
            return -std::numeric_limits<double>::infinity();
        }
        if (p == 1.0) {
            return std::numeric_limits<double>::infinity();
        }
        return std::numeric_limits<double>::quiet_NaN();
    }
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                   1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                4.6303378461565452959) * r + 1.42343711074968357734) /
              (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                   0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                   0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                5.4637849111641143699) * r + 6.6579046435011037772) /
              (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                   7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -val : val;
}

WienerPath::WienerPath(std::uint64_t master_seed, std::size_t components, std::size_t modes, std::size_t n_fine,
                       double dt_fine)
    : seed_(master_seed),
      components_(components),
      modes_(modes),
      n_fine_(n_fine),
      dt_fine_(dt_fine),
      scale_(std::sqrt(dt_fine))
{
    if (n_fine < 1) {
        throw ConfigError("path", "a Wiener path needs at least one fine step");
    }
    if (!(dt_fine > 0.0) || !std::isfinite(dt_fine)) {
        throw ConfigError("path", "dt_fine must be positive");
    }
}

WienerPath sample_path(std::uint64_t master_seed, std::size_t components, std::size_t modes, std::size_t n_fine,
                       double dt_fine)
{
    return WienerPath(master_seed, components, modes, n_fine, dt_fine);
}

double WienerPath::increment(std::size_t l, std::size_t k, std::size_t i) const
{
    if (table_) {
        return (*table_)[(l * modes_ + k) * n_fine_ + i];
    }
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                                  static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(l)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return normal_quantile(to_open_unit(bits)) * scale_;
}

unsigned WienerPath::level_for(double dt) const
{
    const double ratio = dt / dt_fine_;
    const double level = std::round(std::log2(ratio));
    if (level < 0.0 || std::abs(std::ldexp(dt_fine_, static_cast<int>(level)) - dt) > 1e-12 * dt) {
        throw ConfigError("dt", "time step " + std::to_string(dt) + " is not a power-of-two multiple of dt_fine " +
                                    std::to_string(dt_fine_));
    }
    return static_cast<unsigned>(level);
}

IncrementTable WienerPath::coarse(unsigned level, std::size_t steps) const
{
    const std::size_t group = std::size_t{1} << level;
    const std::size_t available = n_fine_ / group;
    if (steps == 0) {
        steps = available;
    }
    if (steps > available) {
        throw ConfigError("path", "path covers " + std::to_string(available) + " steps at level " +
                                      std::to_string(level) + ", " + std::to_string(steps) + " requested");
    }
    IncrementTable t;
    t.components = components_;
    t.modes = modes_;
    t.steps = steps;
    t.dt = std::ldexp(dt_fine_, static_cast<int>(level));
    t.data.assign(steps * components_ * modes_, 0.0);
    std::vector<double> buf(group);
    for (std::size_t l = 0; l < components_; ++l) {
        for (std::size_t k = 0; k < modes_; ++k) {
            for (std::size_t s = 0; s < steps; ++s) {
                for (std::size_t q = 0; q < group; ++q) {
                    buf[q] = increment(l, k, s * group + q);
                }
                for (std::size_t width = 1; width < group; width *= 2) {
                    for (std::size_t q = 0; q < group; q += 2 * width) {
                        buf[q] += buf[q + width];
                    }
                }
                t.data[(s * components_ + l) * modes_ + k] = buf[0];
            }
        }
    }
    return t;
}

namespace {

template <class T>
void put_le(std::ofstream& out, T value)
{
    std::uint64_t bits;
    static_assert(sizeof(T) == sizeof(bits));
    std::memcpy(&bits, &value, sizeof(bits));
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
}

template <class T>
T get_le(std::ifstream& in)
{
    std::uint64_t bits = 0;
    in.read(reinterpret_cast<char*>(&bits), sizeof(bits));
    if (!in) {
        throw ConfigError("path file", "truncated path file");
    }
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    T value;
    std::memcpy(&value, &bits, sizeof(bits));
    return value;
}

}  // namespace

void WienerPath::write_binary(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("output", "cannot write " + path.string());
    }
    put_le<std::uint64_t>(out, seed_);
    put_le<std::uint64_t>(out, components_);
    put_le<std::uint64_t>(out, modes_);
    put_le<std::uint64_t>(out, n_fine_);
    put_le<double>(out, dt_fine_);
    for (std::size_t l = 0; l < components_; ++l) {
        for (std::size_t k = 0; k < modes_; ++k) {
            for (std::size_t i = 0; i < n_fine_; ++i) {
                put_le<double>(out, increment(l, k, i));
            }
        }
    }
}

WienerPath WienerPath::read_binary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("path file", "cannot open " + path.string());
    }
    const auto seed = get_le<std::uint64_t>(in);
    const auto r = get_le<std::uint64_t>(in);
    const auto K = get_le<std::uint64_t>(in);
    const auto n = get_le<std::uint64_t>(in);
    const auto dt = get_le<double>(in);
    WienerPath p(seed, r, K, n, dt);
    auto table = std::make_shared<std::vector<double>>(r * K * n);
    for (auto& v : *table) {
        v = get_le<double>(in);
    }
    p.table_ = std::move(table);
    return p;
}

}  // namespace srd
