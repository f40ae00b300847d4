#include "rwos/walk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "rwos/error.hpp"

namespace rwos {

IncrementSpec IncrementSpec::simple_symmetric() { return IncrementSpec{}; }

IncrementSpec IncrementSpec::gaussian(double sigma, double mean) {
    require(std::isfinite(sigma) && sigma > 0, "gaussian sigma must be positive");
    require(std::isfinite(mean), "gaussian mean must be finite");
    IncrementSpec s;
    s.kind_ = Kind::gaussian;
    s.sigma_ = sigma;
    s.mean_ = mean;
    return s;
}

IncrementSpec IncrementSpec::laplace(double b) {
    require(std::isfinite(b) && b > 0, "laplace scale must be positive");
    IncrementSpec s;
    s.kind_ = Kind::laplace;
    s.b_ = b;
    return s;
}

IncrementSpec IncrementSpec::mixture(std::vector<std::pair<double, IncrementSpec>> components) {
    require(!components.empty(), "mixture needs at least one component");
    double total = 0;
    for (const auto& [w, c] : components) {
        require(std::isfinite(w) && w > 0, "mixture weights must be positive");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to 1");
    IncrementSpec s;
    s.kind_ = Kind::mixture;
    s.comps_ = std::move(components);
    double acc = 0;
    for (const auto& [w, c] : s.comps_) {
        acc += w;
        s.cumw_.push_back(acc / total);
    }
    s.cumw_.back() = 1.0;
    return s;
}

const IncrementSpec& IncrementSpec::pick(Rng& rng) const {
    if (kind_ != Kind::mixture) return *this;
    const double u = rng.uniform();
    std::size_t i = 0;
    while (i + 1 < cumw_.size() && u >= cumw_[i]) ++i;
    return comps_[i].second.pick(rng);
}

double IncrementSpec::draw(Rng& rng) const {
    switch (kind_) {
    case Kind::simple_symmetric:
        return rng.coin() ? 1.0 : -1.0;
    case Kind::gaussian:
        return mean_ + sigma_ * rng.normal();
    case Kind::laplace: {
        const double e = b_ * rng.exponential();
        return rng.coin() ? e : -e;
    }
    case Kind::mixture:
        break;
    }
    throw Error(Status::internal, "draw called on a mixture");
}

bool IncrementSpec::is_lattice() const {
    if (kind_ == Kind::mixture)
        return std::all_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.second.is_lattice(); });
    return kind_ == Kind::simple_symmetric;
}

bool IncrementSpec::has_drift() const {
    if (kind_ == Kind::mixture)
        return std::any_of(comps_.begin(), comps_.end(), [](const auto& c) { return c.second.has_drift(); });
    return kind_ == Kind::gaussian && mean_ != 0.0;
}

double IncrementSpec::stddev() const {
    switch (kind_) {
    case Kind::simple_symmetric: return 1.0;
    case Kind::gaussian: return sigma_;
    case Kind::laplace: return std::sqrt(2.0) * b_;
    case Kind::mixture: break;
    }
    throw Error(Status::internal, "stddev called on a mixture");
}

nlohmann::json IncrementSpec::to_json() const {
    switch (kind_) {
    case Kind::simple_symmetric: return {{"model", "simple-symmetric"}};
    case Kind::gaussian: return {{"model", "gaussian"}, {"sigma", sigma_}, {"mean", mean_}};
    case Kind::laplace: return {{"model", "laplace"}, {"b", b_}};
    case Kind::mixture: {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& [w, c] : comps_) arr.push_back({{"weight", w}, {"spec", c.to_json()}});
        return {{"model", "mixture"}, {"components", arr}};
    }
    }
    return {};
}

IncrementSpec IncrementSpec::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("model"), "increment spec needs a model field");
    const std::string m = j.at("model").get<std::string>();
    if (m == "simple-symmetric" || m == "ssrw") return simple_symmetric();
    if (m == "gaussian") return gaussian(j.value("sigma", 1.0), j.value("mean", 0.0));
    if (m == "laplace") return laplace(j.value("b", 1.0));
    if (m == "mixture") {
        std::vector<std::pair<double, IncrementSpec>> comps;
        for (const auto& c : j.at("components"))
            comps.emplace_back(c.at("weight").get<double>(), from_json(c.at("spec")));
        return mixture(std::move(comps));
    }
    fail("unknown increment model: " + m);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        fail("not a number: '" + s + "'");
    }
    require(pos == s.size(), "not a number: '" + s + "'");
    return v;
}

}  // namespace

IncrementSpec IncrementSpec::parse(const std::string& text) {
    if (text == "ssrw" || text == "simple" || text == "simple-symmetric") return simple_symmetric();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    if (head == "gaussian" || head == "normal") {
        if (rest.empty()) return gaussian(1.0);
        auto parts = split(rest, ':');
        require(parts.size() <= 2, "gaussian takes sigma[:mean]");
        return gaussian(to_double(parts[0]), parts.size() == 2 ? to_double(parts[1]) : 0.0);
    }
    if (head == "laplace") return laplace(rest.empty() ? 1.0 : to_double(rest));
    if (head == "mix") {
        std::vector<std::pair<double, IncrementSpec>> comps;
        for (const auto& item : split(rest, ',')) {
            const auto star = item.find('*');
            require(star != std::string::npos, "mixture items are WEIGHT*SPEC");
            const std::string sub = item.substr(star + 1);
            require(sub.rfind("mix", 0) != 0, "nested mixtures are only accepted as JSON");
            comps.emplace_back(to_double(item.substr(0, star)), parse(sub));
        }
        return mixture(std::move(comps));
    }
    fail("unknown increment spec: '" + text + "'");
}

std::string IncrementSpec::describe() const { return to_json().dump(); }

WalkPath::WalkPath(std::vector<double> increments) : inc_(std::move(increments)) {
    sums_.resize(inc_.size() + 1);
    sums_[0] = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < inc_.size(); ++k) {
        require(std::isfinite(inc_[k]), "increments must be finite");
        s += inc_[k];
        sums_[k + 1] = s;
    }
}

bool WalkPath::operator==(const WalkPath& o) const {
    if (inc_.size() != o.inc_.size()) return false;
    for (std::size_t i = 0; i < inc_.size(); ++i)
        if (std::bit_cast<std::uint64_t>(inc_[i]) != std::bit_cast<std::uint64_t>(o.inc_[i])) return false;
    return true;
}

std::string WalkPath::to_csv() const {
    std::string out = "x\n";
    char buf[40];
    for (double x : inc_) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        out += buf;
    }
    return out;
}

WalkPath WalkPath::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "x", "CSV header must be 'x'");
    std::vector<double> inc;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        inc.push_back(to_double(line));
    }
    return WalkPath(std::move(inc));
}

nlohmann::json WalkPath::to_json() const { return {{"increments", inc_}}; }

WalkPath WalkPath::from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("increments") && j["increments"].is_array(),
            "path JSON needs an increments array");
    std::vector<double> inc;
    for (const auto& v : j["increments"]) {
        require(v.is_number(), "increments must be numbers");
        inc.push_back(v.get<double>());
    }
    return WalkPath(std::move(inc));
}

void sample_increments(const IncrementSpec& spec, Rng& rng, std::vector<double>& out) {
    const IncrementSpec& s = spec.pick(rng);
    for (auto& x : out) x = s.draw(rng);
}

WalkPath sample_path(const IncrementSpec& spec, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "path length must be at least 1");
    Rng rng(seed);
    std::vector<double> inc(n);
    sample_increments(spec, rng, inc);
    return WalkPath(std::move(inc));
}

std::size_t last_argmin(const std::vector<double>& v) {
    std::size_t a = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[a]) a = i;
    return a;
}

OrderStats order_statistics(const std::vector<double>& sums) {
    require(!sums.empty(), "order statistics of an empty sequence");
    OrderStats o;
    o.values = sums;
    for (double v : o.values) require(!std::isnan(v), "NaN in partial sums");
    std::sort(o.values.begin(), o.values.end());
    o.min = o.values.front();
    o.max = o.values.back();
    o.gaps.resize(o.values.size() - 1);
    for (std::size_t k = 1; k < o.values.size(); ++k) o.gaps[k - 1] = o.values[k] - o.values[k - 1];
    o.shifted.resize(o.values.size());
    for (std::size_t k = 0; k < o.values.size(); ++k) o.shifted[k] = o.values[k] - o.min;
    o.argmin_last = last_argmin(sums);
    return o;
}

OrderStats order_statistics(const WalkPath& path) { return order_statistics(path.sums()); }

WalkPath reverse_path(const WalkPath& path) {
    std::vector<double> inc(path.increments().rbegin(), path.increments().rend());
    return WalkPath(std::move(inc));
}

}  // namespace rwos
