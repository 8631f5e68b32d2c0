#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polymerlab/rng.hpp"

namespace polymer {

enum class EnvKind { gaussian, rademacher, uniform, shifted_exponential };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

// Distribution of a single disorder variable. All kinds are mean 0 /
// variance 1 at default parameters; `shift` and `scale` allow overrides
// (value = shift + scale * standard draw).
struct EnvSpec {
    EnvKind kind = EnvKind::gaussian;
    double shift = 0.0;
    double scale = 1.0;

    double mean() const { return shift; }
    double variance() const { return scale * scale; }

    // Open interval on which log Q e^{beta*omega} is finite.
    std::pair<double, double> mgf_interval() const;
    bool mgf_finite_at(double beta) const;

    // lambda(beta) = log Q e^{beta*omega}, closed form per kind.
    double log_mgf(double beta) const;

    // Standard (shift=0, scale=1) draw from the given cell bits.
    double standard_draw(std::uint64_t bits) const;
    double draw(std::uint64_t bits) const { return shift + scale * standard_draw(bits); }

    std::string to_json() const;
    static EnvSpec from_json(const std::string& text);
};

// Variance of the tilted variable (e^{lambda(2b)-2lambda(b)} - 1)/b^2;
// +inf when 2b escapes the MGF interval.
double tilted_variance(const EnvSpec& spec, double beta_n);

// The i.i.d. space-time disorder field omega(i,x), 1 <= i <= n, |x| <=
// halfwidth, i <-> x parity only. Default fields are counter-based: every
// cell is a pure function of (seed, i, x, spec), so nothing is stored and
// regeneration of any sub-rectangle is trivially consistent. Explicitly
// stored tables exist for the enumeration oracles. Immutable after
// construction; safe for concurrent readers.
class EnvField {
public:
    static EnvField sample(const EnvSpec& spec, int n, int halfwidth, std::uint64_t seed);
    static EnvField from_values(const EnvSpec& spec, int n, int halfwidth,
                                std::vector<std::vector<double>> rows);

    // omega(i,x); asserts parity and bounds.
    double value(int i, long x) const;
    // Pre-tilt value (equals value() on untilted fields).
    double raw_value(int i, long x) const;

    // Tilted field omega~ = (e^{b*omega - lambda(b)} - 1)/b. The returned
    // field reports declared mean 0 and the exact tilted variance.
    EnvField tilted(double beta_n) const;

    // omega'(i,x) = omega(m+i, y+x): evolving from origin (m,y) on this
    // field equals evolving from (0,0) on the shifted one.
    EnvField shifted_window(int m, long y) const;

    // omega'(j,x) = omega(m+k-j, x) for m+1 <= j <= k (time reversal of the
    // window (m,k]; requires m >= 1 so no row 0 is referenced).
    EnvField reversed_window(int m, int k) const;

    int n() const { return n_; }
    int halfwidth() const { return halfwidth_; }
    std::uint64_t seed() const { return seed_; }
    const EnvSpec& spec() const { return spec_; }
    bool is_tilted() const { return tilt_.has_value(); }

    double declared_mean() const { return tilt_ ? 0.0 : spec_.mean(); }
    double declared_variance() const;

    static bool parity_valid(int i, long x) { return ((i ^ x) & 1) == 0; }

    // Serialized manifest (spec, n, halfwidth, seed); fields are never
    // persisted, only regenerated.
    std::string manifest_json() const;

private:
    struct TiltInfo {
        double beta;
        double lambda;
        double variance;
    };

    EnvField(EnvSpec spec, int n, int halfwidth, std::uint64_t seed);

    EnvSpec spec_;
    int n_ = 0;
    int halfwidth_ = 0;
    std::uint64_t seed_ = 0;
    std::optional<TiltInfo> tilt_;
    // empty => counter-based generation
    std::shared_ptr<const std::vector<std::vector<double>>> rows_;

    double stored_at(int i, long x) const;
};

}  // namespace polymer
