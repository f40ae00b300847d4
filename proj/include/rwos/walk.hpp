#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rwos/rng.hpp"

namespace rwos {

/// Law of a single increment, or a de Finetti mixture of such laws.
class IncrementSpec {
public:
    enum class Kind { simple_symmetric, gaussian, laplace, mixture };

    static IncrementSpec simple_symmetric();
    /// Normal(mean, sigma^2).
    static IncrementSpec gaussian(double sigma, double mean = 0.0);
    /// Density (1/2b) exp(-|x|/b).
    static IncrementSpec laplace(double b);
    static IncrementSpec mixture(std::vector<std::pair<double, IncrementSpec>> components);

    Kind kind() const { return kind_; }
    double sigma() const { return sigma_; }
    double mean() const { return mean_; }
    double scale() const { return b_; }
    const std::vector<std::pair<double, IncrementSpec>>& components() const { return comps_; }

    /// Draw the component used for one path. Non-mixtures return themselves.
    const IncrementSpec& pick(Rng& rng) const;
    /// One increment from a non-mixture spec.
    double draw(Rng& rng) const;

    bool is_lattice() const;
    bool has_drift() const;
    /// Standard deviation of a non-mixture spec.
    double stddev() const;

    nlohmann::json to_json() const;
    static IncrementSpec from_json(const nlohmann::json& j);
    /// Parses "ssrw", "gaussian:SIGMA[:MEAN]", "laplace:B", "mix:W1*SPEC1,W2*SPEC2".
    static IncrementSpec parse(const std::string& text);
    std::string describe() const;

private:
    IncrementSpec() = default;
    Kind kind_ = Kind::simple_symmetric;
    double sigma_ = 1.0;
    double mean_ = 0.0;
    double b_ = 1.0;
    std::vector<std::pair<double, IncrementSpec>> comps_;
    std::vector<double> cumw_;
};

/// Increments X_1..X_n and partial sums S_0..S_n.
class WalkPath {
public:
    WalkPath() : sums_{0.0} {}
    explicit WalkPath(std::vector<double> increments);

    std::size_t size() const { return inc_.size(); }
    const std::vector<double>& increments() const { return inc_; }
    const std::vector<double>& sums() const { return sums_; }

    bool operator==(const WalkPath& o) const;

    std::string to_csv() const;
    static WalkPath from_csv(const std::string& text);
    nlohmann::json to_json() const;
    static WalkPath from_json(const nlohmann::json& j);

private:
    std::vector<double> inc_;
    std::vector<double> sums_;
};

struct OrderStats {
    std::vector<double> values;
    std::vector<double> gaps;     // D_1..D_n
    std::vector<double> shifted;  // W_0..W_n
    std::size_t argmin_last = 0;
    double min = 0.0;
    double max = 0.0;
};

WalkPath sample_path(const IncrementSpec& spec, std::size_t n, std::uint64_t seed);
/// Increments for one path written into out; the mixture component is drawn first.
void sample_increments(const IncrementSpec& spec, Rng& rng, std::vector<double>& out);

OrderStats order_statistics(const WalkPath& path);
OrderStats order_statistics(const std::vector<double>& sums);
WalkPath reverse_path(const WalkPath& path);

/// Last index attaining the minimum of v.
std::size_t last_argmin(const std::vector<double>& v);

}  // namespace rwos
