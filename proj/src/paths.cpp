#include "bsphere/paths.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bsphere/errors.hpp"

namespace bsphere {

namespace {

using Vec9 = std::array<double, 9>;

double norm9(const Vec9& v) noexcept {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

void require_grid(std::size_t n, double T, const char* who) {
    if (n < 1) throw ParameterError(std::string(who) + ": n must be >= 1");
    if (!(T > 0.0) || !std::isfinite(T))
        throw ParameterError(std::string(who) + ": duration must be positive");
}

} // namespace

bool is_excursion(const GridPath& path) noexcept {
    if (path.values.size() < 2) return false;
    if (path.values.front() != 0.0 || path.values.back() != 0.0) return false;
    return std::all_of(path.values.begin(), path.values.end(), [](double v) { return v >= 0.0; });
}

GridPath sample_bridge(RandomStream& rng, std::size_t n, double T, double a, double b) {
    require_grid(n, T, "sample_bridge");
    GridPath p;
    p.duration = T;
    p.values.resize(n + 1);
    p.values[0] = a;
    p.values[n] = b;
    const double dt = T / static_cast<double>(n);
    double x = a;
    for (std::size_t i = 1; i < n; ++i) {
        const double rem = static_cast<double>(n - i + 1);
        x += (b - x) / rem + std::sqrt(dt * (rem - 1.0) / rem) * rng.normal();
        p.values[i] = x;
    }
    return p;
}

GridPath sample_normalized_excursion(RandomStream& rng, std::size_t n) {
    if (n < 2) throw ParameterError("sample_normalized_excursion: n must be >= 2");
    const GridPath bridge = sample_bridge(rng, n, 1.0, 0.0, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (bridge.values[i] < bridge.values[k]) k = i;
    GridPath e;
    e.duration = 1.0;
    e.values.resize(n + 1);
    const double base = bridge.values[k];
    for (std::size_t i = 0; i < n; ++i) e.values[i] = bridge.values[(k + i) % n] - base;
    e.values[0] = 0.0;
    e.values[n] = 0.0;
    return e;
}

GridPath sample_excursion(RandomStream& rng, std::size_t n, double T) {
    require_grid(n, T, "sample_excursion");
    if (n < 2) throw ParameterError("sample_excursion: n must be >= 2");
    GridPath e;
    e.duration = T;
    e.values.assign(n + 1, 0.0);
    const double h = T / static_cast<double>(n);
    double x[3] = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double rem = static_cast<double>(n - i) * h;
        const double keep = 1.0 - h / rem;
        const double sd = std::sqrt(h * (rem - h) / rem);
        for (double& c : x) c = c * keep + sd * rng.normal();
        e.values[i + 1] = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }
    return e;
}

GridPath sample_dyck_excursion(RandomStream& rng, std::size_t n, double T) {
    require_grid(n, T, "sample_dyck_excursion");
    if (n < 2 || n % 2 != 0) throw ParameterError("sample_dyck_excursion: n must be even and >= 2");
    std::vector<int> steps(n + 1, -1);
    std::fill(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(n / 2), 1);
    for (std::size_t k = n; k > 0; --k) {
        const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(k + 1));
        std::swap(steps[k], steps[std::min(j, k)]);
    }
    int level = 0, low = 0;
    std::size_t start = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        level += steps[k];
        if (level < low) low = level, start = k + 1;
    }
    GridPath e;
    e.duration = T;
    e.values.assign(n + 1, 0.0);
    const double h = std::sqrt(T / static_cast<double>(n));
    int height = 0;
    for (std::size_t k = 0; k < n; ++k) {
        height += steps[(start + k) % (n + 1)];
        e.values[k + 1] = h * height;
    }
    return e;
}

double ito_density(double t) noexcept {
    return 1.0 / (2.0 * std::sqrt(2.0 * std::numbers::pi * t * t * t));
}

DurationSample sample_duration(RandomStream& rng, double a, double b) {
    if (!(a > 0.0) || !(b > a) || !std::isfinite(b))
        throw ParameterError("sample_duration: need 0 < a < b");
    DurationSample s;
    s.duration = a + (b - a) * rng.uniform();
    s.importance_weight = (b - a) * ito_density(s.duration);
    return s;
}

GridPath sample_bessel9(RandomStream& rng, double x0, double dt, double horizon) {
    if (!(x0 >= 0.0)) throw ParameterError("sample_bessel9: x0 must be nonnegative");
    if (!(dt > 0.0) || !(horizon >= dt)) throw ParameterError("sample_bessel9: need 0 < dt <= horizon");
    const auto n = static_cast<std::size_t>(std::floor(horizon / dt * (1.0 + 1e-12)));
    GridPath p;
    p.duration = static_cast<double>(n) * dt;
    p.values.resize(n + 1);
    Vec9 x{};
    x[0] = x0;
    p.values[0] = x0;
    const double sd = std::sqrt(dt);
    for (std::size_t i = 1; i <= n; ++i) {
        for (double& c : x) c += sd * rng.normal();
        p.values[i] = norm9(x);
    }
    return p;
}

double bessel9_return_probability(double r, double level) noexcept {
    if (r <= level) return 1.0;
    return std::pow(level / r, 7.0);
}

namespace {

Vec9 bridge_point(RandomStream& rng, const Vec9& a, const Vec9& b, double len, double u) {
    const double w = u / len;
    const double sd = std::sqrt(u * (len - u) / len);
    Vec9 x;
    for (int c = 0; c < 9; ++c) x[c] = a[c] + w * (b[c] - a[c]) + sd * rng.normal();
    return x;
}

struct Sample9 {
    double t;
    Vec9 x;
};

// Latest visit below `level` inside the cell (a, b), searched right half first.
// Every sampled point at or before the returned one is appended to `out` in time order.
bool latest_dip(RandomStream& rng, const Sample9& a, const Sample9& b, double level, int depth,
                std::vector<Sample9>& out) {
    const double len = b.t - a.t;
    const double gap = std::min(norm9(a.x), norm9(b.x)) - level;
    if (depth == 0 || gap > 5.0 * std::sqrt(len)) return false;
    const Sample9 mid{a.t + 0.5 * len, bridge_point(rng, a.x, b.x, len, 0.5 * len)};
    std::vector<Sample9> right;
    if (latest_dip(rng, mid, b, level, depth - 1, right)) {
        out.push_back(mid);
        out.insert(out.end(), right.begin(), right.end());
        return true;
    }
    if (norm9(mid.x) <= level) {
        out.push_back(mid);
        return true;
    }
    return latest_dip(rng, a, mid, level, depth - 1, out);
}

} // namespace

LastPassage bessel9_last_passage(RandomStream& rng, double level, double dt,
                                 const LastPassageOptions& opt) {
    if (!(level > 0.0) || !(dt > 0.0))
        throw ParameterError("bessel9_last_passage: level and dt must be positive");
    if (!(opt.ceiling_factor > 1.0))
        throw ParameterError("bessel9_last_passage: ceiling factor must exceed 1");

    struct Record {
        std::uint64_t k;
        Vec9 x;
    };
    std::vector<Record> rec;
    rec.push_back({0, Vec9{}});
    const double ceiling = opt.ceiling_factor * level;
    const auto k_max = static_cast<std::uint64_t>(opt.max_time / dt);
    std::size_t last_low = 0;
    while (true) {
        const Record& cur = rec.back();
        const double r = norm9(cur.x);
        if (r <= level) last_low = rec.size() - 1;
        if (r > ceiling) break;
        std::uint64_t steps = 1;
        if (r >= 2.0 * level) {
            const double d = (r - level) / 6.0;
            steps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(d * d / dt));
        }
        if (cur.k + steps > k_max) {
            std::ostringstream msg;
            msg << "bessel9_last_passage: time horizon " << opt.max_time
                << " exhausted at radius " << r << " (ceiling " << ceiling << ")";
            throw ResourceError(msg.str());
        }
        Record next{cur.k + steps, cur.x};
        const double sd = std::sqrt(static_cast<double>(steps) * dt);
        for (double& c : next.x) c += sd * rng.normal();
        rec.push_back(next);
    }

    // grid points up to the last low record, skipped points bridged in
    std::vector<Vec9> grid;
    grid.push_back(rec[0].x);
    for (std::size_t j = 1; j <= last_low; ++j) {
        const Record& b = rec[j];
        for (std::uint64_t k = rec[j - 1].k + 1; k < b.k; ++k) {
            const Vec9& prev = grid.back();
            const double rem = static_cast<double>(b.k - k + 1);
            const double sd = std::sqrt(dt * (rem - 1.0) / rem);
            Vec9 x;
            for (int c = 0; c < 9; ++c) x[c] = prev[c] + (b.x[c] - prev[c]) / rem + sd * rng.normal();
            grid.push_back(x);
        }
        grid.push_back(b.x);
    }
    const std::uint64_t n_low = rec[last_low].k;

    // returns below the level between later fine records, latest cell first
    std::size_t fine_end = last_low;
    while (fine_end + 1 < rec.size() && rec[fine_end + 1].k == rec[fine_end].k + 1) ++fine_end;
    std::vector<Sample9> tail{{static_cast<double>(n_low) * dt, rec[last_low].x}};
    for (std::size_t j = fine_end; j > last_low; --j) {
        const Sample9 a{static_cast<double>(rec[j - 1].k) * dt, rec[j - 1].x};
        const Sample9 b{static_cast<double>(rec[j].k) * dt, rec[j].x};
        std::vector<Sample9> dip;
        if (!latest_dip(rng, a, b, level, opt.bisection_depth, dip)) continue;
        for (std::size_t i = last_low + 1; i < j; ++i)
            tail.push_back({static_cast<double>(rec[i].k) * dt, rec[i].x});
        tail.push_back(a);
        if (j - 1 == last_low) tail.pop_back();
        tail.insert(tail.end(), dip.begin(), dip.end());
        break;
    }
    const std::size_t last = tail.size() - 1;

    LastPassage out;
    out.last_passage_time = tail[last].t;
    // whole grid steps inside the tail up to the last passage
    std::uint64_t n = n_low;
    for (std::size_t i = 1; i <= last; ++i) {
        const double kk = tail[i].t / dt;
        if (std::abs(kk - std::round(kk)) < 1e-9) {
            grid.push_back(tail[i].x);
            n = static_cast<std::uint64_t>(std::llround(kk));
        }
    }
    out.last_passage_index = static_cast<std::size_t>(n);
    out.path.duration = static_cast<double>(n) * dt;
    out.path.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out.path.values[i] = norm9(grid[i]);

    out.times.reserve(n_low + 1 + last);
    out.points.reserve(n_low + 1 + last);
    for (std::uint64_t k = 0; k <= n_low; ++k) {
        out.times.push_back(static_cast<double>(k) * dt);
        out.points.push_back(grid[k]);
    }
    for (std::size_t i = 1; i <= last; ++i) {
        out.times.push_back(tail[i].t);
        out.points.push_back(tail[i].x);
    }
    return out;
}

double LastPassage::radius_at(RandomStream& rng, double t) const {
    if (times.empty()) return 0.0;
    t = std::clamp(t, 0.0, last_passage_time);
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.end()) return norm9(points.back());
    const auto i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double u = t - times[i];
    if (u <= 0.0) return norm9(points[i]);
    return norm9(bridge_point(rng, points[i], points[i + 1], times[i + 1] - times[i], u));
}

double sample_inverse_gaussian(RandomStream& rng, double mu, double lambda) {
    const double z = rng.normal();
    const double y = mu * z * z / (2.0 * lambda);
    const double x = mu / (1.0 + y + std::sqrt(y * y + 2.0 * y));
    if (rng.uniform() * (mu + x) <= mu) return x;
    return mu * mu / x;
}

double sample_bridge_min(RandomStream& rng, double a, double b, double T) {
    const double e = rng.exponential();
    return 0.5 * ((a + b) - std::sqrt((a - b) * (a - b) + 2.0 * T * e));
}

double sample_bridge_min_above(RandomStream& rng, double a, double b, double T, double floor) {
    const double A = a - floor;
    const double B = b - floor;
    if (A <= 0.0 || B <= 0.0) return floor;
    const double u = rng.uniform_open();
    const double K = -0.5 * T * std::log1p(u * std::expm1(-2.0 * A * B / T));
    const double y = 0.5 * ((A + B) - std::sqrt((A - B) * (A - B) + 4.0 * K));
    return floor + std::clamp(y, 0.0, std::min(A, B));
}

double sample_bridge_argmin(RandomStream& rng, double a, double b, double T, double m) {
    const double da = a - m;
    const double db = b - m;
    if (da <= 0.0) return 0.0;
    if (db <= 0.0) return T;
    const double c1 = da * da / (2.0 * T);
    const double c2 = db * db / (2.0 * T);
    const double ratio = std::sqrt(c1 / c2);
    double v;
    if (rng.uniform() * (1.0 + ratio) < 1.0)
        v = sample_inverse_gaussian(rng, ratio, 2.0 * c1);
    else
        v = 1.0 / sample_inverse_gaussian(rng, 1.0 / ratio, 2.0 * c2);
    return T * v / (1.0 + v);
}

} // namespace bsphere
