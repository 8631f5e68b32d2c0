#include "polymerlab/env.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polymer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt3 = std::sqrt(3.0);

// log(sinh(z)/z), stable through z = 0.
double log_sinhc(double z) {
    z = std::fabs(z);
    if (z < 1e-4) {
        const double z2 = z * z;
        return std::log1p(z2 / 6.0 * (1.0 + z2 / 20.0));
    }
    // sinh(z)/z = (1 - e^{-2z}) e^{z} / (2z)
    return z + std::log1p(-std::exp(-2.0 * z)) - std::log(2.0 * z);
}

double log_cosh(double z) {
    z = std::fabs(z);
    return z + std::log1p(std::exp(-2.0 * z)) - std::log(2.0);
}

}  // namespace

std::string to_string(EnvKind kind) {
    switch (kind) {
        case EnvKind::gaussian: return "gaussian";
        case EnvKind::rademacher: return "rademacher";
        case EnvKind::uniform: return "uniform";
        case EnvKind::shifted_exponential: return "shifted_exponential";
    }
    return "unknown";
}

EnvKind env_kind_from_string(const std::string& name) {
    if (name == "gaussian") return EnvKind::gaussian;
    if (name == "rademacher") return EnvKind::rademacher;
    if (name == "uniform") return EnvKind::uniform;
    if (name == "shifted_exponential") return EnvKind::shifted_exponential;
    throw std::invalid_argument("unknown environment kind: " + name);
}

std::pair<double, double> EnvSpec::mgf_interval() const {
    switch (kind) {
        case EnvKind::gaussian:
        case EnvKind::rademacher:
        case EnvKind::uniform:
            return {-kInf, kInf};
        case EnvKind::shifted_exponential:
            // Exp(1)-1 has MGF 1/((1-b) e^{b}) for b < 1; scaling moves the
            // endpoint to 1/scale.
            if (scale > 0.0) return {-kInf, 1.0 / scale};
            if (scale < 0.0) return {1.0 / scale, kInf};
            return {-kInf, kInf};
    }
    return {-kInf, kInf};
}

bool EnvSpec::mgf_finite_at(double beta) const {
    auto [lo, hi] = mgf_interval();
    return beta > lo && beta < hi;
}

double EnvSpec::log_mgf(double beta) const {
    if (!mgf_finite_at(beta)) {
        auto [lo, hi] = mgf_interval();
        std::ostringstream msg;
        msg << "log_mgf: beta=" << beta << " outside finite-MGF interval (" << lo << ", "
            << hi << ") of kind " << to_string(kind);
        throw std::domain_error(msg.str());
    }
    const double b = scale * beta;
    double lam = 0.0;
    switch (kind) {
        case EnvKind::gaussian: lam = 0.5 * b * b; break;
        case EnvKind::rademacher: lam = log_cosh(b); break;
        case EnvKind::uniform: lam = log_sinhc(kSqrt3 * b); break;
        case EnvKind::shifted_exponential: lam = -b - std::log1p(-b); break;
    }
    return shift * beta + lam;
}

double EnvSpec::standard_draw(std::uint64_t bits) const {
    const double u = unit_open(bits);
    switch (kind) {
        case EnvKind::gaussian: return normal_quantile(u);
        case EnvKind::rademacher: return u < 0.5 ? -1.0 : 1.0;
        case EnvKind::uniform: return kSqrt3 * (2.0 * u - 1.0);
        case EnvKind::shifted_exponential: return -std::log1p(-u) - 1.0;
    }
    return 0.0;
}

std::string EnvSpec::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = to_string(kind);
    j["params"] = {{"shift", shift}, {"scale", scale}};
    return j.dump();
}

EnvSpec EnvSpec::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    EnvSpec spec;
    spec.kind = env_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("params")) {
        spec.shift = j["params"].value("shift", 0.0);
        spec.scale = j["params"].value("scale", 1.0);
    }
    return spec;
}

double tilted_variance(const EnvSpec& spec, double beta_n) {
    if (!spec.mgf_finite_at(2.0 * beta_n)) return kInf;
    const double lam1 = spec.log_mgf(beta_n);
    const double lam2 = spec.log_mgf(2.0 * beta_n);
    return std::expm1(lam2 - 2.0 * lam1) / (beta_n * beta_n);
}

EnvField::EnvField(EnvSpec spec, int n, int halfwidth, std::uint64_t seed)
    : spec_(spec), n_(n), halfwidth_(halfwidth), seed_(seed) {}

EnvField EnvField::sample(const EnvSpec& spec, int n, int halfwidth, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_env: n must be >= 1");
    if (halfwidth < n)
        throw std::invalid_argument("sample_env: halfwidth < n, walk can exit the stored window");
    return EnvField(spec, n, halfwidth, seed);
}

EnvField EnvField::from_values(const EnvSpec& spec, int n, int halfwidth,
                               std::vector<std::vector<double>> rows) {
    if (static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("from_values: need one row per time step");
    EnvField f(spec, n, halfwidth, 0);
    for (int i = 1; i <= n; ++i) {
        const long hi = halfwidth - ((halfwidth ^ i) & 1);
        if (static_cast<long>(rows[i - 1].size()) != hi + 1)
            throw std::invalid_argument("from_values: row has wrong number of parity sites");
    }
    f.rows_ = std::make_shared<const std::vector<std::vector<double>>>(std::move(rows));
    return f;
}

double EnvField::stored_at(int i, long x) const {
    const long hi = halfwidth_ - ((halfwidth_ ^ i) & 1);
    return (*rows_)[i - 1][static_cast<std::size_t>((x + hi) / 2)];
}

double EnvField::raw_value(int i, long x) const {
    assert(i >= 1 && i <= n_);
    assert(std::labs(x) <= halfwidth_);
    assert(parity_valid(i, x));
    if (rows_) return stored_at(i, x);
    return spec_.draw(cell_bits(seed_, i, x));
}

double EnvField::value(int i, long x) const {
    const double w = raw_value(i, x);
    if (!tilt_) return w;
    return std::expm1(tilt_->beta * w - tilt_->lambda) / tilt_->beta;
}

double EnvField::declared_variance() const {
    return tilt_ ? tilt_->variance : spec_.variance();
}

EnvField EnvField::tilted(double beta_n) const {
    if (tilt_) throw std::logic_error("tilt_env: field is already tilted");
    if (beta_n == 0.0) throw std::invalid_argument("tilt_env: beta_n = 0 undefined");
    if (!spec_.mgf_finite_at(beta_n))
        throw std::domain_error("tilt_env: beta_n outside finite-MGF interval");
    EnvField f = *this;
    f.tilt_ = TiltInfo{beta_n, spec_.log_mgf(beta_n), tilted_variance(spec_, beta_n)};
    return f;
}

EnvField EnvField::shifted_window(int m, long y) const {
    if (m < 0 || m >= n_) throw std::invalid_argument("shifted_window: bad m");
    if (!((m == 0 && y == 0) || (m >= 1 && parity_valid(m, y))))
        throw std::invalid_argument("shifted_window: origin off-lattice");
    const int nn = n_ - m;
    const int hw = nn;
    if (std::labs(y) + nn > halfwidth_)
        throw std::invalid_argument("shifted_window: window exits stored field");
    std::vector<std::vector<double>> rows(nn);
    for (int j = 1; j <= nn; ++j) {
        const long hj = hw - ((hw ^ j) & 1);
        rows[j - 1].resize(hj + 1);
        for (long x = -hj; x <= hj; x += 2)
            rows[j - 1][(x + hj) / 2] = value(m + j, y + x);
    }
    EnvSpec spec = spec_;  // tilt already applied to values
    return from_values(spec, nn, hw, std::move(rows));
}

EnvField EnvField::reversed_window(int m, int k) const {
    if (!(1 <= m && m < k && k <= n_)) throw std::invalid_argument("reversed_window: need 1 <= m < k <= n");
    if ((k - m) & 1)
        throw std::invalid_argument("reversed_window: window length must be even (parity lattice)");
    std::vector<std::vector<double>> rows(n_);
    for (int j = 1; j <= n_; ++j) {
        const long hj = halfwidth_ - ((halfwidth_ ^ j) & 1);
        rows[j - 1].assign(hj + 1, 0.0);
        const int src = m + k - j;
        if (j > m && j <= k) {
            for (long x = -hj; x <= hj; x += 2) rows[j - 1][(x + hj) / 2] = value(src, x);
        }
    }
    return from_values(spec_, n_, halfwidth_, std::move(rows));
}

std::string EnvField::manifest_json() const {
    nlohmann::ordered_json j;
    j["spec"] = nlohmann::ordered_json::parse(spec_.to_json());
    j["n"] = n_;
    j["halfwidth"] = halfwidth_;
    j["seed"] = seed_;
    if (tilt_) j["tilt_beta"] = tilt_->beta;
    return j.dump();
}

}  // namespace polymer
