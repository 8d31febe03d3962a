// granlab — command-line laboratory for the granular-gas solution families:
// homogeneous cooling, uniform-deformation blow-up runs, the constrained 1D
// Riemann problem with delta fronts, the Lagrangian cosine-pressure family,
// residual certification, and resonance tables.
//
// Every subcommand is a thin adapter over the library: it parses parameters,
// runs the corresponding constructors/oracles, and writes deterministic CSV
// tables and a JSON report (schema_version "1", machine-readable `failures`).
// Exit codes: 0 pass, 1 check failure, 2 usage or validation error,
// 3 numerical failure.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "granular/granular.hpp"
#include "granular/io.hpp"
#include "granular/parallel.hpp"

using json = nlohmann::ordered_json;
using namespace granular;

namespace {

struct GlobalOpts {
    std::string out_dir;
    int jobs = 1;
    bool csv = true;
    bool js = true;
    bool svg = false;

    std::string path(const std::string& name) const {
        std::filesystem::create_directories(out_dir);
        return (std::filesystem::path(out_dir) / name).string();
    }
};

void write_json(const GlobalOpts& g, const std::string& name, const json& j) {
    if (!g.js) return;
    std::ofstream out(g.path(name));
    out << j.dump(2) << "\n";
}

json base_report(const std::string& subcommand) {
    json j;
    j["schema_version"] = "1";
    j["subcommand"] = subcommand;
    return j;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',' || ch == ';') {
            if (!cur.empty()) out.push_back(std::stod(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// haff
// ---------------------------------------------------------------------------

int cmd_haff(const GlobalOpts& g, double lambda, double rho0, double T0, double t_final,
             int samples) {
    const ModelParams p(1.4, lambda, 1);  // the cooling law does not involve gamma
    const HaffParams h(rho0, T0);

    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = -lambda * rho0 * std::pow(std::max(y[0], 0.0), 1.5);
    };
    OdeOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    std::vector<double> ts;
    for (int i = 0; i < samples; ++i)
        ts.push_back(t_final * (samples == 1 ? 0.0 : i / double(samples - 1)));
    if (t_final == 0) ts = {0.0};
    opt.force_times = ts;
    OdeTrajectory tr;
    if (t_final > 0) tr = integrate_ode(rhs, 0.0, {T0}, t_final, opt);

    double max_rel = 0;
    std::optional<CsvWriter> csv;
    if (g.csv) csv.emplace(g.path("haff.csv"), std::vector<std::string>{"t", "T_closed",
                                                                        "T_integrated", "abs_diff"});
    for (double t : ts) {
        const double closed = haff_temperature(p, h, t);
        const double integrated = (t == 0 || t_final == 0) ? T0 : tr.sample(t)[0];
        max_rel = std::max(max_rel, std::abs(closed - integrated) / closed);
        if (csv) csv->row({t, closed, integrated, std::abs(closed - integrated)});
    }

    json rep = base_report("haff");
    rep["lambda"] = lambda;
    rep["rho0"] = rho0;
    rep["T0"] = T0;
    rep["t_final"] = t_final;
    rep["max_rel_diff"] = max_rel;
    rep["tolerance"] = 1e-8;
    rep["failures"] = json::array();
    if (max_rel > 1e-8)
        rep["failures"].push_back({{"check", "closed_form_vs_integration"},
                                   {"max_rel_diff", max_rel}});
    write_json(g, "haff.json", rep);
    std::cout << "haff: max rel diff " << format_number(max_rel) << "\n";
    return max_rel <= 1e-8 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// uniform
// ---------------------------------------------------------------------------

int cmd_uniform(const GlobalOpts& g, int n, double gamma, double lambda,
                const std::string& alpha_str, const std::string& A_str,
                const std::string& beta_str, const std::string& B_str, double C0, double phi0,
                double t_final, const std::vector<double>& snapshot_times, double grid_lo,
                double grid_hi, int grid_points, double rtol, double blowup_threshold) {
    const ModelParams p(gamma, lambda, n);
    UDState s0;
    s0.alpha = Mat(n);
    s0.beta = Vec(n);
    s0.A = Mat(n);
    s0.B = Vec(n);
    s0.C = C0;
    s0.phi = phi0;
    const auto alpha_v = parse_list(alpha_str), A_v = parse_list(A_str);
    const auto beta_v = parse_list(beta_str), B_v = parse_list(B_str);
    if (int(alpha_v.size()) != n * n || int(A_v.size()) != n * n || int(beta_v.size()) != n ||
        int(B_v.size()) != n)
        throw std::invalid_argument("uniform: alpha/A need n*n entries, beta/B need n entries");
    for (int i = 0; i < n; ++i) {
        s0.beta[i] = beta_v[std::size_t(i)];
        s0.B[i] = B_v[std::size_t(i)];
        for (int j = 0; j < n; ++j) {
            s0.alpha(i, j) = alpha_v[std::size_t(i) * std::size_t(n) + std::size_t(j)];
            s0.A(i, j) = A_v[std::size_t(i) * std::size_t(n) + std::size_t(j)];
        }
    }
    s0.A = symmetrize(s0.A);

    UDIntegrateOptions opt;
    opt.rtol = rtol;
    opt.atol = rtol * 1e-2;
    opt.blowup_threshold = blowup_threshold;
    opt.sample_times = snapshot_times;
    const Trajectory tr = integrate(p, s0, t_final, opt);

    if (g.csv) {
        std::vector<std::string> head{"t", "phi", "C"};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                head.push_back("alpha_" + std::to_string(i) + std::to_string(j));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) head.push_back("A_" + std::to_string(i) + std::to_string(j));
        for (int i = 0; i < n; ++i) head.push_back("beta_" + std::to_string(i));
        for (int i = 0; i < n; ++i) head.push_back("B_" + std::to_string(i));
        CsvWriter csv(g.path("trajectory.csv"), head);
        for (const UDState& s : tr.samples) {
            std::vector<double> row{s.t, s.phi, s.C};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) row.push_back(s.alpha(i, j));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) row.push_back(s.A(i, j));
            for (int i = 0; i < n; ++i) row.push_back(s.beta[i]);
            for (int i = 0; i < n; ++i) row.push_back(s.B[i]);
            csv.row(row);
        }
    }

    int snap_idx = 0;
    for (double ts : snapshot_times) {
        if (ts > tr.back().t) break;
        UDState s = tr.back();
        bool found = false;
        for (const UDState& q : tr.samples)
            if (q.t == ts) {
                s = q;
                found = true;
            }
        if (!found) s = detail::unpack(n, ts, tr.raw.sample(ts));
        if (g.csv && n <= 2) {
            CsvWriter csv(g.path("fields_" + std::to_string(snap_idx) + ".csv"),
                          n == 1 ? std::vector<std::string>{"x", "rho", "v", "T"}
                                 : std::vector<std::string>{"x", "y", "rho", "vx", "vy", "T"});
            const int rows = grid_points * (n == 2 ? grid_points : 1);
            std::vector<std::vector<double>> buf;
            buf.resize(std::size_t(rows));
            parallel_for(std::size_t(rows), g.jobs, [&](std::size_t k) {
                const int i = int(k) / (n == 2 ? grid_points : 1);
                const int j = int(k) % (n == 2 ? grid_points : 1);
                Vec x(n);
                x[0] = grid_lo + (grid_hi - grid_lo) * i / double(grid_points - 1);
                if (n == 2) x[1] = grid_lo + (grid_hi - grid_lo) * j / double(grid_points - 1);
                try {
                    const GasSample smp = reconstruct_fields(s, x);
                    if (n == 1)
                        buf[k] = {x[0], smp.rho, smp.v[0], smp.T};
                    else
                        buf[k] = {x[0], x[1], smp.rho, smp.v[0], smp.v[1], smp.T};
                } catch (const std::domain_error&) {
                    // outside the physical support: masked, not extrapolated
                }
            });
            for (const auto& row : buf)
                if (!row.empty()) csv.row(row);
        }
        if (g.svg && n == 2) {
            SvgPlot plot(grid_lo, grid_hi, grid_lo, grid_hi);
            const int gp = grid_points;
            std::vector<double> vals(std::size_t(gp) * std::size_t(gp), -1.0);
            double rho_max = 0;
            for (int i = 0; i < gp; ++i)
                for (int j = 0; j < gp; ++j) {
                    Vec x(2);
                    x[0] = grid_lo + (grid_hi - grid_lo) * i / double(gp - 1);
                    x[1] = grid_lo + (grid_hi - grid_lo) * j / double(gp - 1);
                    try {
                        const double r = reconstruct_fields(s, x).rho;
                        vals[std::size_t(i) * std::size_t(gp) + std::size_t(j)] = r;
                        rho_max = std::max(rho_max, r);
                    } catch (const std::domain_error&) {
                    }
                }
            const double cell = (grid_hi - grid_lo) / (gp - 1);
            for (int i = 0; i < gp; ++i)
                for (int j = 0; j < gp; ++j) {
                    const double r = vals[std::size_t(i) * std::size_t(gp) + std::size_t(j)];
                    if (r < 0) continue;
                    const double x = grid_lo + cell * i, y = grid_lo + cell * j;
                    plot.cell(x, x + cell, y, y + cell, r / rho_max);
                }
            plot.save(g.path("density_" + std::to_string(snap_idx) + ".svg"));
        }
        ++snap_idx;
    }

    json rep = base_report("uniform");
    rep["n"] = n;
    rep["gamma"] = gamma;
    rep["lambda"] = lambda;
    rep["termination"] = to_string(tr.termination);
    rep["t_last"] = tr.back().t;
    rep["failures"] = json::array();
    if (tr.termination == Termination::BlowUpDetected) {
        rep["t_estimate"] = tr.t_estimate;
        try {
            rep["density_exponent"] = density_exponent_fit(tr, 0.25);
        } catch (const std::domain_error& e) {
            rep["density_exponent_error"] = e.what();
        }
    }
    if (n == 2) {
        try {
            const auto series = anisotropy_diagnostic(tr);
            rep["anisotropy_final_ratio"] = series.back().ratio;
            if (g.csv) {
                CsvWriter csv(g.path("anisotropy.csv"), {"t", "ratio"});
                for (const auto& a : series) csv.row({a.t, a.ratio});
            }
        } catch (const std::domain_error& e) {
            rep["anisotropy_error"] = e.what();
        }
    }
    if (tr.termination == Termination::StepUnderflow) {
        rep["failures"].push_back({{"check", "integration"}, {"reason", "step underflow"}});
        write_json(g, "uniform.json", rep);
        std::cout << "uniform: step underflow at t = " << format_number(tr.back().t) << "\n";
        return 3;
    }
    write_json(g, "uniform.json", rep);
    std::cout << "uniform: " << to_string(tr.termination) << " at t = "
              << format_number(tr.back().t) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// riemann
// ---------------------------------------------------------------------------

int cmd_riemann(const GlobalOpts& g, double vL, double vR, double TL, double TR, double lambda,
                double c, double t_final, const std::vector<double>& snapshot_times, double x_lo,
                double x_hi, int points) {
    const RiemannData d(vL, vR, TL, TR, lambda, c);
    const PiecewiseSolution sol = solve(d);
    const Regime& reg = sol.regime();

    json rep = base_report("riemann");
    rep["vL"] = vL;
    rep["vR"] = vR;
    rep["TL"] = TL;
    rep["TR"] = TR;
    rep["lambda"] = lambda;
    rep["c"] = c;
    rep["regime"] = to_string(reg.kind);
    if (reg.kind == RegimeKind::DelayedConcentration) {
        rep["t_doublestar"] = reg.t_doublestar;
        rep["t_star"] = reg.t_star;
    }
    if (vL > vR) rep["concentration_onset_time"] = concentration_onset_time(d);
    rep["failures"] = json::array();

    const int nt = 101;
    if (g.csv) {
        CsvWriter fronts(g.path("fronts.csv"),
                         {"t", "x_minus", "x_plus", "x_star", "theta", "transitional"});
        for (int i = 0; i < nt; ++i) {
            const double t = t_final * i / double(nt - 1);
            std::vector<std::string> row{format_number(t)};
            if (sol.has_delta_at(t)) {
                row.push_back("");
                row.push_back("");
                row.push_back(format_number(sol.delta().position(t)));
                row.push_back(format_number(sol.delta().theta(t)));
                row.push_back(sol.transitional(t) ? "1" : "0");
            } else {
                row.push_back(format_number(d.x_minus(t)));
                row.push_back(format_number(d.x_plus(t)));
                row.push_back("");
                row.push_back("");
                row.push_back("0");
            }
            fronts.row_mixed(row);
        }

        CsvWriter masses(g.path("point_masses.csv"), {"t", "x_star", "theta"});
        int snap_idx = 0;
        for (double t : snapshot_times) {
            CsvWriter snap(g.path("snapshot_" + std::to_string(snap_idx) + ".csv"),
                           {"x", "v", "T", "rho_regular"});
            for (int i = 0; i < points; ++i) {
                const double x = x_lo + (x_hi - x_lo) * i / double(points - 1);
                try {
                    const SolutionSample smp = sol.eval(t, x);
                    snap.row({x, smp.v, smp.T, smp.rho_regular});
                } catch (const std::domain_error&) {
                }
            }
            for (const PointMass& pm : sol.point_masses(t)) masses.row({t, pm.x, pm.mass});
            ++snap_idx;
        }
    }
    if (g.svg) {
        SvgPlot plot(0, t_final, x_lo, x_hi);
        std::vector<double> tc, xm, xp, tf, xs;
        for (int i = 0; i < nt; ++i) {
            const double t = t_final * i / double(nt - 1);
            if (sol.has_delta_at(t)) {
                tf.push_back(t);
                xs.push_back(sol.delta().position(t));
            } else {
                tc.push_back(t);
                xm.push_back(d.x_minus(t));
                xp.push_back(d.x_plus(t));
            }
        }
        if (!xm.empty()) {
            plot.polyline(tc, xm, "blue");
            plot.polyline(tc, xp, "blue");
        }
        if (!xs.empty()) plot.polyline(tf, xs, "red");
        plot.save(g.path("fronts.svg"));
    }

    write_json(g, "riemann.json", rep);
    std::cout << "riemann: regime " << to_string(reg.kind);
    if (reg.kind == RegimeKind::DelayedConcentration)
        std::cout << ", t** = " << format_number(reg.t_doublestar)
                  << ", t* = " << format_number(reg.t_star);
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// meerson
// ---------------------------------------------------------------------------

int cmd_meerson(const GlobalOpts& g, double mu, double lambda, double gamma, double amp,
                const std::vector<double>& snapshot_times, int points) {
    const MeersonParams p = mu > 0 ? MeersonParams::from_mu(amp, mu, gamma)
                                   : MeersonParams::from_model(lambda, gamma, amp);
    const GlobalBlowup gb = global_blowup(p);

    json rep = base_report("meerson");
    rep["mu"] = p.mu;
    rep["lambda"] = p.lambda();
    rep["gamma"] = p.gamma;
    rep["amplitude"] = p.amplitude;
    rep["t_star_global"] = gb.t_star;
    rep["m_star"] = gb.m_star;
    rep["failures"] = json::array();

    {
        std::vector<double> lx, ly;
        for (double tau : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
            lx.push_back(std::log(tau * gb.t_star));
            ly.push_back(std::log(density_lagrangian(p, gb.m_star, gb.t_star * (1 - tau))));
        }
        rep["density_exponent"] = fit_line(lx, ly).slope;
    }

    int snap_idx = 0;
    for (double t : snapshot_times) {
        if (!(t < gb.t_star)) {
            rep["failures"].push_back({{"check", "snapshot_time"},
                                       {"reason", "at or beyond the global blow-up"},
                                       {"t", t}});
            continue;
        }
        if (g.csv) {
            const EulerLagrangeMaps maps = euler_lagrange_maps(p, t, 1e-6);
            CsvWriter snap(g.path("meerson_" + std::to_string(snap_idx) + ".csv"),
                           {"m", "x", "rho", "v", "T"});
            const double lo = p.mass_lo() + 1e-6, hi = p.mass_hi() - 1e-6;
            for (int i = 0; i < points; ++i) {
                const double m = lo + (hi - lo) * i / double(points - 1);
                snap.row({m, maps.x_of_m(m), density_lagrangian(p, m, t), velocity_field(p, m, t),
                          temperature_lagrangian(p, m, t)});
            }
        }
        ++snap_idx;
    }
    for (auto it = snapshot_times.rbegin(); it != snapshot_times.rend(); ++it)
        if (*it < gb.t_star) {
            const double mass = eulerian_total_mass(p, *it, 1e-6);
            const double expected = (p.mass_hi() - p.mass_lo()) - 2e-6;
            rep["eulerian_mass"] = mass;
            rep["eulerian_mass_expected"] = expected;
            if (std::abs(mass - expected) > 1e-6 * expected)
                rep["failures"].push_back({{"check", "mass_conservation"},
                                           {"value", mass},
                                           {"expected", expected}});
            break;
        }

    write_json(g, "meerson.json", rep);
    std::cout << "meerson: global blow-up time " << format_number(gb.t_star) << " at m = "
              << format_number(gb.m_star) << "\n";
    return rep["failures"].empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct TableField {
    std::vector<double> ts, xs;
    std::vector<std::vector<double>> rho, v, T;  // [it][ix]

    double interp(const std::vector<std::vector<double>>& val, double t, double x) const {
        auto locate = [](const std::vector<double>& grid, double q) {
            auto it = std::upper_bound(grid.begin(), grid.end(), q);
            std::ptrdiff_t k = (it - grid.begin()) - 1;
            k = std::max<std::ptrdiff_t>(
                1, std::min<std::ptrdiff_t>(k, std::ptrdiff_t(grid.size()) - 3));
            return std::size_t(k - 1);  // 4-point window start
        };
        const std::size_t i0 = locate(ts, t), j0 = locate(xs, x);
        double wt[4], wx[4];
        for (int a = 0; a < 4; ++a) {
            wt[a] = wx[a] = 1;
            for (int b = 0; b < 4; ++b) {
                if (a == b) continue;
                wt[a] *= (t - ts[i0 + b]) / (ts[i0 + a] - ts[i0 + b]);
                wx[a] *= (x - xs[j0 + b]) / (xs[j0 + a] - xs[j0 + b]);
            }
        }
        double out = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out += wt[a] * wx[b] * val[i0 + a][j0 + b];
        return out;
    }
};

TableField load_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("verify: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header: t,x,rho,v,T
    std::map<double, std::map<double, std::array<double, 3>>> grid;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto vals = parse_list(line);
        if (vals.size() != 5) throw std::invalid_argument("verify: rows need t,x,rho,v,T");
        grid[vals[0]][vals[1]] = {vals[2], vals[3], vals[4]};
    }
    TableField f;
    for (const auto& [t, row] : grid) {
        (void)row;
        f.ts.push_back(t);
    }
    for (const auto& [x, q] : grid.begin()->second) {
        (void)q;
        f.xs.push_back(x);
    }
    for (const auto& [t, row] : grid) {
        (void)t;
        if (row.size() != f.xs.size())
            throw std::invalid_argument("verify: table is not a rectangular grid");
        std::vector<double> r, v, T;
        for (const auto& [x, q] : row) {
            (void)x;
            r.push_back(q[0]);
            v.push_back(q[1]);
            T.push_back(q[2]);
        }
        f.rho.push_back(r);
        f.v.push_back(v);
        f.T.push_back(T);
    }
    if (f.ts.size() < 4 || f.xs.size() < 4)
        throw std::invalid_argument("verify: need at least a 4x4 grid");
    return f;
}

int finish_verify(const GlobalOpts& g, json& rep, const std::vector<ResidualReport>& reps,
                  bool floor_passes, const std::string& json_name = "verify.json") {
    const auto orders = convergence_order(reps);
    json jreps = json::array();
    for (const auto& r : reps) {
        json jr;
        jr["h"] = r.h;
        jr["system"] = to_string(r.system);
        for (const auto& e : r.equations) {
            jr["max_norm"][e.name] = e.max_norm;
            jr["l2_norm"][e.name] = e.l2_norm;
        }
        jreps.push_back(jr);
    }
    rep["reports"] = jreps;
    bool ok = true;
    for (const auto& o : orders) {
        json jo;
        jo["equation"] = o.equation;
        jo["order"] = o.order;
        jo["at_rounding_floor"] = o.at_rounding_floor;
        rep["orders"].push_back(jo);
        const bool pass =
            (o.at_rounding_floor && floor_passes) || (o.order >= 1.7 && o.order <= 2.3);
        if (!pass) {
            ok = false;
            rep["failures"].push_back({{"check", "convergence_order"},
                                       {"equation", o.equation},
                                       {"order", o.order}});
        }
    }
    write_json(g, json_name, rep);
    for (const auto& o : orders)
        std::cout << "verify: " << o.equation << " order " << format_number(o.order)
                  << (o.at_rounding_floor ? " (rounding floor)" : "") << "\n";
    return ok ? 0 : 1;
}

int cmd_verify(const GlobalOpts& g, const std::string& scenario, const std::string& fields_path,
               std::vector<double> hs) {
    json rep = base_report("verify");
    rep["scenario"] = fields_path.empty() ? scenario : "imported";
    rep["failures"] = json::array();
    rep["orders"] = json::array();
    if (hs.empty()) hs = {1e-2, 5e-3, 2.5e-3};

    if (!fields_path.empty()) {
        auto table = std::make_shared<TableField>(load_table(fields_path));
        const ModelParams p(2.0, 1.0, 1);  // constants for the energy sink of the check
        FieldSet f;
        f.dim = 1;
        f.rho = [table](double t, const Vec& x) { return table->interp(table->rho, t, x[0]); };
        f.velocity = [table](double t, const Vec& x) {
            return Vec{table->interp(table->v, t, x[0])};
        };
        f.temperature = [table](double t, const Vec& x) {
            return table->interp(table->T, t, x[0]);
        };
        const double tspan = table->ts.back() - table->ts.front();
        const double xspan = table->xs.back() - table->xs.front();
        GridSpec grid{table->ts.front() + 0.25 * tspan, table->ts.back() - 0.25 * tspan, Vec{0.0},
                      Vec{0.0}, 4, 9};
        grid.x_lo[0] = table->xs.front() + 0.25 * xspan;
        grid.x_hi[0] = table->xs.back() - 0.25 * xspan;
        std::vector<ResidualReport> reps;
        for (double h : hs) reps.push_back(residual_euler(f, p, grid, h));
        return finish_verify(g, rep, reps, false);
    }

    if (scenario == "haff-constant") {
        const ModelParams p(1.4, 2.0, 2);
        FieldSet f;
        f.dim = 2;
        f.rho = [](double, const Vec&) { return 1.0; };
        f.velocity = [](double, const Vec&) { return Vec(2); };
        f.temperature = [p](double t, const Vec&) {
            return haff_temperature(p, HaffParams(1.0, 1.0), t);
        };
        GridSpec grid{0.5, 2.0, Vec{-1.0, -1.0}, Vec{1.0, 1.0}, 3, 5};
        std::vector<ResidualReport> reps;
        for (double h : hs) reps.push_back(residual_euler(f, p, grid, h));
        return finish_verify(g, rep, reps, true);
    }
    if (scenario == "exact-family-1d") {
        const ModelParams p(2.0, 1.0, 1);
        const ExactFamily1D fam(p, -0.8, 1.0, 1.0);
        FieldSet f;
        f.dim = 1;
        f.rho = [&](double t, const Vec& x) {
            const IsotropicState s = fam.state(t);
            return s.phi / std::sqrt(s.a * x[0] * x[0] + s.C);
        };
        f.velocity = [&](double t, const Vec& x) { return Vec{fam.state(t).alpha1 * x[0]}; };
        f.temperature = [&](double t, const Vec& x) {
            const IsotropicState s = fam.state(t);
            return s.a * x[0] * x[0] + s.C;
        };
        GridSpec grid{0.1, 0.5, Vec{-0.5}, Vec{0.5}, 5, 9};
        std::vector<ResidualReport> reps;
        for (double h : hs) reps.push_back(residual_euler(f, p, grid, h));
        return finish_verify(g, rep, reps, false);
    }
    if (scenario == "two-contact") {
        const RiemannData d(0, 1, 1, 1, 2, 1);
        auto sol = std::make_shared<PiecewiseSolution>(d);
        const ModelParams p(-1.0, 2.0, 1);
        Chaplygin1DFields f;
        f.v = [sol](double t, double x) { return sol->eval(t, x).v; };
        f.w = [sol](double t, double x) { return std::sqrt(sol->eval(t, x).T); };
        f.phi = [d](double t) { return d.phi(t); };
        f.fronts = [sol](double t) { return sol->fronts(t); };
        const Grid1D grid{1.0, 2.0, -2.5, 3.5, 3, 25};
        std::vector<ResidualReport> prim, cons;
        for (double h : hs) {
            prim.push_back(residual_chaplygin(f, p, grid, h));
            cons.push_back(residual_chaplygin(f, p, grid, h, true));
        }
        json rep2 = rep;
        const int rc1 = finish_verify(g, rep, prim, false, "verify.json");
        const int rc2 = finish_verify(g, rep2, cons, false, "verify_conservative.json");
        return rc1 != 0 ? rc1 : rc2;
    }
    if (scenario == "meerson") {
        const MeersonParams p = MeersonParams::from_mu(1.0, 1.0);
        std::vector<ResidualReport> reps;
        for (double h : hs) {
            const auto r = lagrangian_residual(p, -1.0, 1.0, 0.2, 0.6, 7, 5, h);
            ResidualReport rr{EquationSystem::Lagrangian, h, {}};
            rr.equations = {{"mass", r.mass_max, r.mass_max},
                            {"momentum", r.momentum_max, r.momentum_max},
                            {"energy", r.energy_max, r.energy_max}};
            reps.push_back(rr);
        }
        return finish_verify(g, rep, reps, false);
    }
    throw std::invalid_argument("verify: unknown scenario '" + scenario + "'");
}

// ---------------------------------------------------------------------------
// resonance
// ---------------------------------------------------------------------------

int cmd_resonance(const GlobalOpts& g, int n, double gamma, double lambda, double A0, double C0) {
    const ModelParams p(gamma, lambda, n);
    const Balance b = blowup_balance_isotropic(p, 1.0, A0, C0);
    const ResonanceReport rep = resonances(p, b);

    json j = base_report("resonance");
    j["n"] = n;
    j["gamma"] = gamma;
    j["lambda"] = lambda;
    j["exponents"] = b.s;
    j["coefficients"] = b.lambda;
    json rows = json::array();
    for (int i = 0; i < 4; ++i) {
        json r = json::array();
        for (int k = 0; k < 4; ++k) r.push_back(rep.matrix_R(i, k));
        rows.push_back(r);
    }
    j["matrix_R"] = rows;
    json evs = json::array();
    for (const auto& z : rep.eigenvalues) evs.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["eigenvalues"] = evs;
    j["failures"] = json::array();
    write_json(g, "resonance.json", j);

    if (g.csv) {
        CsvWriter csv(g.path("resonance.csv"), {"re", "im"});
        for (const auto& z : rep.eigenvalues) csv.row({z.real(), z.imag()});
    }
    std::cout << "resonance: eigenvalues";
    for (const auto& z : rep.eigenvalues) std::cout << " " << format_number(z.real());
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"granlab — granular-gas exact-solution laboratory"};
    app.set_config("--config", "", "flat key=value configuration file");

    GlobalOpts g;
    const char* env_out = std::getenv("GRANLAB_OUT");
    g.out_dir = env_out ? env_out : ".";
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--jobs", g.jobs, "worker threads for grid sweeps");
    app.add_flag("--csv,!--no-csv", g.csv, "write CSV tables");
    app.add_flag("--json,!--no-json", g.js, "write JSON reports");
    app.add_flag("--svg", g.svg, "write SVG plots");
    app.require_subcommand(1);

    double ha_lambda = 1, ha_rho0 = 1, ha_T0 = 1, ha_tfinal = 10;
    int ha_samples = 51;
    auto* haff = app.add_subcommand("haff", "homogeneous cooling law vs integration");
    haff->fallthrough();
    haff->add_option("--lambda", ha_lambda);
    haff->add_option("--rho0", ha_rho0);
    haff->add_option("--t0", ha_T0);
    haff->add_option("--t-final", ha_tfinal);
    haff->add_option("--samples", ha_samples);

    int un_n = 2;
    double un_gamma = 5.0 / 3.0, un_lambda = 1.0, un_C0 = 1.0, un_phi0 = 1.0, un_tfinal = 10.0;
    double un_grid_lo = -1.0, un_grid_hi = 1.0, un_rtol = 1e-10, un_thresh = 1e12;
    int un_grid_points = 41;
    std::string un_alpha = "-1,0,0,-1", un_A = "0.1,0,0,0.1", un_beta = "0,0", un_B = "0,0";
    std::vector<double> un_times;
    auto* uniform = app.add_subcommand("uniform", "affine-velocity blow-up runs");
    uniform->fallthrough();
    uniform->add_option("--n", un_n);
    uniform->add_option("--gamma", un_gamma);
    uniform->add_option("--lambda", un_lambda);
    uniform->add_option("--alpha", un_alpha, "row-major n*n list");
    uniform->add_option("--A", un_A, "row-major n*n list");
    uniform->add_option("--beta", un_beta);
    uniform->add_option("--B", un_B);
    uniform->add_option("--c0", un_C0);
    uniform->add_option("--phi0", un_phi0);
    uniform->add_option("--t-final", un_tfinal);
    uniform->add_option("--times", un_times, "snapshot times")->delimiter(',');
    uniform->add_option("--grid-lo", un_grid_lo);
    uniform->add_option("--grid-hi", un_grid_hi);
    uniform->add_option("--grid-points", un_grid_points);
    uniform->add_option("--rtol", un_rtol);
    uniform->add_option("--blowup-threshold", un_thresh);

    double ri_vl = 0, ri_vr = 1, ri_tl = 1, ri_tr = 1, ri_lambda = 2, ri_c = 1, ri_tfinal = 5;
    double ri_xlo = -10, ri_xhi = 10;
    int ri_points = 201;
    std::vector<double> ri_times{1.0, 2.0, 4.0};
    auto* riemann = app.add_subcommand("riemann", "constrained 1D Riemann problem");
    riemann->fallthrough();
    riemann->add_option("--vl", ri_vl);
    riemann->add_option("--vr", ri_vr);
    riemann->add_option("--tl", ri_tl);
    riemann->add_option("--tr", ri_tr);
    riemann->add_option("--lambda", ri_lambda);
    riemann->add_option("--c", ri_c);
    riemann->add_option("--t-final", ri_tfinal);
    riemann->add_option("--times", ri_times)->delimiter(',');
    riemann->add_option("--x-lo", ri_xlo);
    riemann->add_option("--x-hi", ri_xhi);
    riemann->add_option("--points", ri_points);

    double me_mu = -1, me_lambda = -1, me_gamma = 2.0, me_amp = 1.0;
    std::vector<double> me_times{0.0, 0.5, 0.9};
    int me_points = 201;
    auto* meerson = app.add_subcommand("meerson", "Lagrangian cosine-pressure family");
    meerson->fallthrough();
    meerson->add_option("--mu", me_mu);
    meerson->add_option("--lambda", me_lambda);
    meerson->add_option("--gamma", me_gamma);
    meerson->add_option("--amp", me_amp);
    meerson->add_option("--times", me_times)->delimiter(',');
    meerson->add_option("--points", me_points);

    std::string ve_scenario = "exact-family-1d", ve_fields;
    std::vector<double> ve_hs;
    auto* verify = app.add_subcommand("verify", "residual certification");
    verify->fallthrough();
    verify->add_option("--scenario", ve_scenario,
                       "haff-constant | exact-family-1d | two-contact | meerson");
    verify->add_option("--fields", ve_fields, "imported field table (t,x,rho,v,T)");
    verify->add_option("--stencil", ve_hs, "stencil widths")->delimiter(',');

    int re_n = 2;
    double re_gamma = 1.0, re_lambda = 1.0, re_A0 = 1.0, re_C0 = 1.0;
    auto* resonance = app.add_subcommand("resonance", "balance resonance table");
    resonance->fallthrough();
    resonance->add_option("--n", re_n);
    resonance->add_option("--gamma", re_gamma);
    resonance->add_option("--lambda", re_lambda);
    resonance->add_option("--a0", re_A0);
    resonance->add_option("--c0", re_C0);

    CLI11_PARSE(app, argc, argv);

    try {
        if (haff->parsed()) return cmd_haff(g, ha_lambda, ha_rho0, ha_T0, ha_tfinal, ha_samples);
        if (uniform->parsed())
            return cmd_uniform(g, un_n, un_gamma, un_lambda, un_alpha, un_A, un_beta, un_B, un_C0,
                               un_phi0, un_tfinal, un_times, un_grid_lo, un_grid_hi,
                               un_grid_points, un_rtol, un_thresh);
        if (riemann->parsed())
            return cmd_riemann(g, ri_vl, ri_vr, ri_tl, ri_tr, ri_lambda, ri_c, ri_tfinal, ri_times,
                               ri_xlo, ri_xhi, ri_points);
        if (meerson->parsed())
            return cmd_meerson(g, me_mu, me_lambda, me_gamma, me_amp, me_times, me_points);
        if (verify->parsed()) return cmd_verify(g, ve_scenario, ve_fields, ve_hs);
        if (resonance->parsed()) return cmd_resonance(g, re_n, re_gamma, re_lambda, re_A0, re_C0);
    } catch (const std::invalid_argument& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
