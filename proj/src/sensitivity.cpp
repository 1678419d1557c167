#include "arbo/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "arbo/errors.hpp"
#include "arbo/rng.hpp"
#include "arbo/thresholds.hpp"
#include "parallel.hpp"

namespace arbo {

namespace {

void assign_ranks(std::vector<double> magnitude, std::vector<int>& rank) {
    std::vector<std::size_t> order(magnitude.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return magnitude[a] > magnitude[b]; });
    int r = 0;
    for (auto i : order) rank[i] = std::isnan(magnitude[i]) ? 0 : ++r;
}

bool is_valid(const ModelParams& p) {
    try {
        validate(p);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

}  // namespace

std::vector<LocalIndex> local_indices(const ModelParams& p) {
    const double r0 = basic_reproduction_number(p);
    if (!(r0 > 0.0)) throw NumericalError("R0 = 0: sensitivity indices are undefined");
    std::vector<LocalIndex> out;
    for (const auto& spec : param_specs()) {
        const std::string key = spec.key;
        const double psi = p.*spec.field;
        LocalIndex li{key, 0.0, 0, false};
        if (key == "a") {
            li = {key, 1.0, 0, true};
        } else if (key == "beta_hv" || key == "beta_vh") {
            li = {key, 0.5, 0, true};
        } else if (psi != 0.0) {
            const double h = kLocalStep * std::abs(psi);
            ModelParams up = p, dn = p;
            up.*spec.field = psi + h;
            dn.*spec.field = psi - h;
            const bool up_ok = is_valid(up), dn_ok = is_valid(dn);
            double deriv;
            if (up_ok && dn_ok)
                deriv = (basic_reproduction_number(up) - basic_reproduction_number(dn)) / (2.0 * h);
            else if (up_ok)
                deriv = (basic_reproduction_number(up) - r0) / h;
            else
                deriv = (r0 - basic_reproduction_number(dn)) / h;
            li.index = psi / r0 * deriv;
        }
        out.push_back(li);
    }
    std::vector<double> mag;
    for (const auto& li : out) mag.push_back(std::abs(li.index));
    std::vector<int> rank(out.size());
    assign_ranks(mag, rank);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = rank[i];
    return out;
}

std::vector<ParamRange> default_ranges(const ModelParams& p) {
    std::vector<ParamRange> out;
    for (const auto& spec : param_specs()) {
        const double m = p.*spec.field;
        double half = 0.5 * std::abs(m);
        const bool unit = spec.bound == Bound::UnitClosed || spec.bound == Bound::UnitHalfOpen ||
                          spec.bound == Bound::UnitPositiveClosed;
        if (unit && m + half > 1.0) half = 1.0 - m;
        if (spec.bound == Bound::UnitHalfOpen && m + half >= 1.0) half = 0.5 * (1.0 - m);
        out.push_back({spec.key, m - half, m + half});
    }
    return out;
}

void validate_ranges(const std::vector<ParamRange>& ranges, const ModelParams& base) {
    for (const auto& r : ranges) {
        const ParamSpec* spec = find_param(r.parameter);
        if (!spec) throw ValidationError(r.parameter, "unknown parameter '" + r.parameter + "'");
        if (!(r.lo <= r.hi)) throw ValidationError(r.parameter, r.parameter + " range has lo > hi");
        for (double x : {r.lo, r.hi}) {
            ModelParams q = base;
            q.*spec->field = x;
            try {
                validate(q);
            } catch (const ValidationError& e) {
                throw ValidationError(r.parameter, std::string("range endpoint: ") + e.what());
            }
        }
    }
}

Eigen::MatrixXd lhs_sample(const LhsConfig& cfg) {
    if (cfg.samples < 1) throw ValidationError("samples", "sample count must be positive");
    const auto n = static_cast<std::size_t>(cfg.samples);
    Eigen::MatrixXd m(cfg.samples, static_cast<Eigen::Index>(cfg.ranges.size()));
    for (std::size_t j = 0; j < cfg.ranges.size(); ++j) {
        CounterRng perm_rng(cfg.seed, 2 * j), jitter(cfg.seed, 2 * j + 1);
        std::vector<std::size_t> stratum(n);
        std::iota(stratum.begin(), stratum.end(), 0);
        for (std::size_t i = n - 1; i > 0; --i) std::swap(stratum[i], stratum[perm_rng.below(i + 1)]);
        const auto& r = cfg.ranges[j];
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (static_cast<double>(stratum[i]) + jitter.uniform()) / static_cast<double>(n);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.lo + (r.hi - r.lo) * u;
        }
    }
    return m;
}

Eigen::VectorXd rank_transform(const Eigen::VectorXd& x) {
    const auto n = static_cast<std::size_t>(x.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[static_cast<Eigen::Index>(a)] < x[static_cast<Eigen::Index>(b)]; });
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && x[static_cast<Eigen::Index>(order[j + 1])] == x[static_cast<Eigen::Index>(order[i])]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[static_cast<Eigen::Index>(order[k])] = avg;
        i = j + 1;
    }
    return r;
}

OutputStats output_stats(const Eigen::VectorXd& y) {
    const double n = static_cast<double>(y.size());
    const double mean = y.mean();
    const double var = y.size() > 1 ? (y.array() - mean).square().sum() / (n - 1.0) : 0.0;
    const double above = static_cast<double>((y.array() > 1.0).count());
    return {mean, std::sqrt(var), above / n};
}

std::vector<PrccEntry> prcc(const Eigen::MatrixXd& samples, const Eigen::VectorXd& outputs,
                            const std::vector<std::string>& names) {
    if (samples.rows() != outputs.size())
        throw ValidationError("outputs", "output count does not match sample rows");
    if (static_cast<std::size_t>(samples.cols()) != names.size())
        throw ValidationError("names", "name count does not match sample columns");
    const Eigen::Index n = samples.rows(), k = samples.cols();

    Eigen::MatrixXd R(n, k);
    std::vector<bool> constant(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        R.col(j) = rank_transform(samples.col(j));
        constant[static_cast<std::size_t>(j)] = samples.col(j).maxCoeff() == samples.col(j).minCoeff();
    }
    const Eigen::VectorXd ry = rank_transform(outputs);
    const bool flat_output = outputs.size() == 0 || outputs.maxCoeff() == outputs.minCoeff();

    std::vector<PrccEntry> out;
    for (Eigen::Index j = 0; j < k; ++j) {
        PrccEntry e{names[static_cast<std::size_t>(j)], NAN, false, 0};
        if (!constant[static_cast<std::size_t>(j)] && !flat_output) {
            Eigen::MatrixXd X(n, 1);
            X.col(0).setOnes();
            for (Eigen::Index c = 0; c < k; ++c) {
                if (c == j || constant[static_cast<std::size_t>(c)]) continue;
                X.conservativeResize(Eigen::NoChange, X.cols() + 1);
                X.col(X.cols() - 1) = R.col(c);
            }
            const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
            const Eigen::VectorXd rx = R.col(j) - X * qr.solve(R.col(j));
            const Eigen::VectorXd rr = ry - X * qr.solve(ry);
            const double den = std::sqrt(rx.squaredNorm() * rr.squaredNorm());
            if (den > 0.0) {
                e.prcc = std::clamp(rx.dot(rr) / den, -1.0, 1.0);
                e.applicable = true;
            }
        }
        out.push_back(e);
    }
    std::vector<double> mag;
    for (const auto& e : out) mag.push_back(e.applicable ? std::abs(e.prcc) : NAN);
    std::vector<int> rank(out.size());
    assign_ranks(mag, rank);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = out[i].applicable ? rank[i] : 0;
    return out;
}

GlobalReport global_analysis(const ModelParams& base, const LhsConfig& cfg, int threads) {
    validate(base);
    validate_ranges(cfg.ranges, base);
    GlobalReport rep;
    rep.samples = lhs_sample(cfg);
    rep.r0 = Eigen::VectorXd::Zero(cfg.samples);

    std::vector<const ParamSpec*> specs;
    std::vector<std::string> names;
    for (const auto& r : cfg.ranges) {
        specs.push_back(find_param(r.parameter));
        names.push_back(r.parameter);
    }
    detail::parallel_for(static_cast<std::size_t>(cfg.samples), threads, [&](std::size_t i) {
        ModelParams q = base;
        const auto row = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < specs.size(); ++j) q.*specs[j]->field = rep.samples(row, static_cast<Eigen::Index>(j));
        try {
            rep.r0[row] = basic_reproduction_number(q);
        } catch (const std::exception&) {
            rep.r0[row] = NAN;
        }
    });
    if (!rep.r0.allFinite()) throw NumericalError("R0 evaluation failed for a sampled parameter set");
    rep.stats = output_stats(rep.r0);
    rep.prcc = prcc(rep.samples, rep.r0, names);
    return rep;
}

}  // namespace arbo
