#include "rdfront/speed_map.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace rdfront {

namespace {
double polar_angle(Vec2 e) { return std::atan2(e.y, e.x); }
} // namespace

double SpeedMap::angular_spacing() const {
    if (samples.size() < 2) return M_PI;
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k)
        worst = std::max(worst, polar_angle(samples[k + 1].e) - polar_angle(samples[k].e));
    return worst;
}

double SpeedMap::max_stderr() const {
    double s = 0.0;
    for (const auto& smp : samples) s = std::max(s, smp.stderr_);
    return s;
}

double SpeedMap::speed_at(Vec2 e_world) const {
    Vec2 e = e_world.normalized();
    if (override_c) return override_c(e);
    if (partial)
        throw ValidationFault("speed map: partial map cannot be evaluated");
    if (samples.size() < 2)
        throw ValidationFault("speed map: needs at least two sampled directions");
    double b = polar_angle(to_frame(e));
    double b_lo = polar_angle(samples.front().e);
    double b_hi = polar_angle(samples.back().e);
    if (b < b_lo - 1e-12 || b > b_hi + 1e-12)
        throw ValidationFault("speed map: direction outside the sampled cap");
    b = std::clamp(b, b_lo, b_hi);
    std::size_t k = 1;
    while (k + 1 < samples.size() && polar_angle(samples[k].e) < b) ++k;
    double b0 = polar_angle(samples[k - 1].e), b1 = polar_angle(samples[k].e);
    double w = b1 > b0 ? (b - b0) / (b1 - b0) : 0.0;
    return (1.0 - w) * samples[k - 1].c + w * samples[k].c;
}

SpeedMap build_speed_map(const PeriodicMedium& medium, Vec2 e0, int direction_count,
                         const FrontRunConfig& run_cfg, int workers) {
    if (direction_count < 8)
        throw ValidationFault("speed map: need at least 8 directions");
    SpeedMap map;
    map.e0 = e0.normalized();

    std::vector<Vec2> dirs;
    for (int k = 1; k <= direction_count; ++k) {
        double beta = M_PI * k / (direction_count + 1);
        dirs.push_back(map.from_frame({std::cos(beta), std::sin(beta)}));
    }

    std::vector<SpeedSample> out(dirs.size());
    auto run_one = [&](std::size_t idx) {
        FrontRunConfig cfg = run_cfg;
        cfg.want_profile = false;
        PulsatingFront f = compute_front(medium, dirs[idx], cfg);
        SpeedSample s;
        s.e = map.to_frame(dirs[idx].normalized());
        s.c = f.speed;
        s.stderr_ = f.speed_stderr;
        s.outcome = f.outcome;
        out[idx] = s;
    };
    if (workers > 1) {
        std::vector<std::future<void>> jobs;
        std::size_t next = 0;
        while (next < dirs.size()) {
            jobs.clear();
            for (int w = 0; w < workers && next < dirs.size(); ++w, ++next)
                jobs.push_back(std::async(std::launch::async, run_one, next));
            for (auto& j : jobs) j.get();
        }
    } else {
        for (std::size_t i = 0; i < dirs.size(); ++i) run_one(i);
    }
    map.samples = std::move(out);
    std::sort(map.samples.begin(), map.samples.end(),
              [](const SpeedSample& a, const SpeedSample& b) {
                  return polar_angle(a.e) < polar_angle(b.e);
              });
    for (const auto& s : map.samples)
        if (s.outcome == FrontOutcome::no_front) map.partial = true;
    return map;
}

SpeedMap override_speed_map(Vec2 e0, std::function<double(Vec2)> c_of_e) {
    SpeedMap map;
    map.e0 = e0.normalized();
    map.override_c = std::move(c_of_e);
    return map;
}

double eval_g(const SpeedMap& map, Vec2 x) {
    double n = x.norm();
    if (n == 0.0) throw ValidationFault("g: x must be nonzero");
    Vec2 e = x * (1.0 / n);
    double tilt = e.dot(map.e0);
    if (tilt <= 0.05)
        throw ValidationFault("g: direction too close to the cap boundary");
    return map.speed_at(e) / tilt;
}

Vec2 grad_g(const SpeedMap& map, Vec2 e, double delta) {
    if (!map.has_override()) {
        double spacing = map.angular_spacing();
        if (delta >= 2.0 * spacing) {
            std::ostringstream os;
            os << "grad g: step " << delta << " not below twice the angular spacing "
               << spacing;
            throw ConfigFault(os.str());
        }
    }
    // fourth-order central stencil keeps the Euler-relation residual of the
    // degree-0 homogeneous g below 1e-6 across the whole cap
    auto d4 = [&](Vec2 dir) {
        auto at = [&](double s) { return eval_g(map, e + dir * s); };
        return (at(-2 * delta) - 8.0 * at(-delta) + 8.0 * at(delta) -
                at(2 * delta)) /
               (12.0 * delta);
    };
    return {d4({1.0, 0.0}), d4({0.0, 1.0})};
}

namespace {

Verdict sign_verdict(double margin, double noise) {
    if (margin > noise) return Verdict::pass;
    if (margin < -noise) return Verdict::fail;
    return Verdict::indeterminate;
}

} // namespace

ConditionReport check_theorem_conditions(const SpeedMap& map, const PolytopeSpec& poly,
                                         TheoremVariant variant, double grad_delta) {
    if (map.partial)
        throw ValidationFault("conditions: partial speed map");
    ConditionReport rep;
    rep.variant = variant;
    const int n = poly.n();
    const bool W = variant == TheoremVariant::existence_W;

    // (i) distinct facets tilted toward e0: exact set checks.
    {
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            if (poly.facets[i].y <= 0.0) ok = false;
            for (int j = i + 1; j < n; ++j)
                if ((poly.facets[i] - poly.facets[j]).norm() < 1e-12) ok = false;
        }
        rep.cond_i = ok ? Verdict::pass : Verdict::fail;
    }

    // (ii) common normalized speed at the facets, stderr-weighted mean.
    double min_tilt = 1.0;
    for (int i = 0; i < n; ++i) min_tilt = std::min(min_tilt, poly.facets[i].y);
    std::vector<double> g_facet(n);
    {
        double wsum = 0.0, acc = 0.0;
        for (int i = 0; i < n; ++i) {
            Vec2 e_world = poly.from_frame(poly.facets[i]);
            g_facet[i] = eval_g(map, e_world);
            double sigma = map.has_override() ? 0.0 : map.max_stderr();
            double w = 1.0 / (sigma * sigma + 1e-16);
            wsum += w;
            acc += w * g_facet[i];
        }
        rep.chat = acc / wsum;
        for (int i = 0; i < n; ++i)
            rep.dev_ii = std::max(rep.dev_ii, std::abs(g_facet[i] - rep.chat));
        rep.tol_ii = map.has_override()
                         ? 1e-10
                         : 3.0 * map.max_stderr() / std::max(min_tilt, 0.05);
        rep.cond_ii = rep.dev_ii <= rep.tol_ii ? Verdict::pass : Verdict::fail;
    }

    // (iii) strict inequality on the cap outside facet neighborhoods,
    // sampled at ten times the map resolution.
    {
        double lo, hi;
        poly.cap_range(lo, hi);
        double base = map.has_override() ? (hi - lo) / 64.0 : map.angular_spacing();
        rep.exclusion_radius = base;
        rep.cap_resolution = base / 10.0;
        rep.interpolation_limited = !map.has_override();
        double margin = 1e300;
        for (double b = lo; b <= hi + 1e-12; b += rep.cap_resolution) {
            bool near_facet = false;
            for (int i = 0; i < n; ++i) {
                double bf = std::atan2(poly.facets[i].y, poly.facets[i].x);
                if (std::abs(b - bf) < rep.exclusion_radius) near_facet = true;
            }
            if (near_facet) continue;
            Vec2 e_frame{std::cos(b), std::sin(b)};
            if (e_frame.y <= 0.05) continue; // g undefined near the cap boundary
            double g = eval_g(map, poly.from_frame(e_frame));
            double gap = W ? g - rep.chat : rep.chat - g;
            margin = std::min(margin, gap);
        }
        rep.margin_iii = margin;
        rep.cond_iii = sign_verdict(margin, rep.tol_ii);
    }

    // (iv) gradient sign table at the facets.
    {
        double spacing = map.has_override() ? grad_delta : map.angular_spacing();
        double step_eff = std::max(grad_delta, 0.5 * spacing);
        rep.noise_floor_iv =
            map.has_override() ? 1e-9
                               : 3.0 * map.max_stderr() /
                                     (min_tilt * min_tilt * step_eff);
        bool all_pass = true;
        bool any_indet = false;
        for (int i = 0; i < n; ++i) {
            Vec2 gi = grad_g(map, poly.from_frame(poly.facets[i]), grad_delta);
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                double v = gi.dot(poly.from_frame(poly.facets[j]));
                PairSign ps;
                ps.i = i;
                ps.j = j;
                ps.value = v;
                double margin = W ? v : -v;
                ps.verdict = sign_verdict(margin, rep.noise_floor_iv);
                if (ps.verdict == Verdict::fail) all_pass = false;
                if (ps.verdict == Verdict::indeterminate) any_indet = true;
                rep.pair_signs.push_back(ps);
            }
        }
        rep.cond_iv = !all_pass ? Verdict::fail
                                : (any_indet ? Verdict::indeterminate : Verdict::pass);
    }
    return rep;
}

std::string ConditionReport::summary() const {
    auto vs = [](Verdict v) {
        switch (v) {
            case Verdict::pass: return "pass";
            case Verdict::fail: return "FAIL";
            default: return "indeterminate";
        }
    };
    std::ostringstream os;
    os << "variant: " << (variant == TheoremVariant::existence_V ? "V" : "W") << "\n";
    os << "(i)   facet set            " << vs(cond_i) << "\n";
    os << "(ii)  common speed         " << vs(cond_ii) << "  chat=" << chat
       << " dev=" << dev_ii << " tol=" << tol_ii << "\n";
    os << "(iii) cap inequality       " << vs(cond_iii) << "  margin=" << margin_iii
       << " (resolution " << cap_resolution
       << (interpolation_limited ? ", interpolation-limited" : "") << ")\n";
    os << "(iv)  gradient sign table  " << vs(cond_iv)
       << "  noise floor=" << noise_floor_iv << "\n";
    for (const auto& p : pair_signs)
        os << "      grad g(e_" << p.i + 1 << ") . e_" << p.j + 1 << " = " << p.value
           << "  [" << vs(p.verdict) << "]\n";
    return os.str();
}

} // namespace rdfront
