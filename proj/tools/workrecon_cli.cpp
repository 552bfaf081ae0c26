// Copyright 2026 The workrecon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "workrecon/io.hpp"

namespace fs = std::filesystem;
using namespace workrecon;

namespace {

struct CommonOpts {
    RunConfig cfg;
    std::vector<double> alpha_in, gamma_in;
    std::string steps_path, config_path;
    std::string outdir = ".";
    bool forward_only = false, backward_only = false;
    double scale_in = 0;
    CLI::Option *scale_opt = nullptr;
};

void add_common(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--dnu-h", o.cfg.hamiltonian.dnu_h, "proton resonance offset (Hz)");
    cmd->add_option("--dnu-c", o.cfg.hamiltonian.dnu_c, "carbon resonance offset (Hz)");
    cmd->add_option("--j", o.cfg.hamiltonian.j_coupling, "scalar coupling (Hz)");
    cmd->add_option("--alpha", o.alpha_in, "six first-block rotation angles (rad)")->expected(6);
    cmd->add_option("--gamma", o.gamma_in, "six second-block rotation angles (rad)")->expected(6);
    cmd->add_option("--steps-file", o.steps_path, "pulse list file replacing the built-in sequence");
    cmd->add_option("--temps", o.cfg.temperatures_pev, "preparation temperatures kT (peV)")
        ->expected(1, -1);
    cmd->add_option("--sigma", o.cfg.sigma, "measurement noise level (std dev per observable)");
    cmd->add_option("--seed", o.cfg.master_seed, "master seed for all random draws");
    cmd->add_option("--trials", o.cfg.trials, "Monte Carlo trials for error propagation");
    cmd->add_option("--mle-tol", o.cfg.mle_tol, "projection convergence tolerance");
    cmd->add_option("--mle-max-iter", o.cfg.mle_max_iter, "projection iteration cap");
    auto *f = cmd->add_flag("--forward-only", o.forward_only, "restrict to the forward drive");
    auto *b = cmd->add_flag("--backward-only", o.backward_only, "restrict to the backward drive");
    f->excludes(b);
    cmd->add_flag("--j-zero", o.cfg.j_zero,
                  "zero the coupling in dynamics and spectrum (pulse timings keep the nominal value)");
    o.scale_opt = cmd->add_option("--scale", o.scale_in, "energy scale override (peV per h*Hz)");
    cmd->add_option("--config", o.config_path, "JSON config file; present keys override flags");
    cmd->add_option("--outdir", o.outdir, "directory for output files");
}

void finalize(CommonOpts &o) {
    if (!o.alpha_in.empty()) std::copy(o.alpha_in.begin(), o.alpha_in.end(), o.cfg.angles.alpha.begin());
    if (!o.gamma_in.empty()) std::copy(o.gamma_in.begin(), o.gamma_in.end(), o.cfg.angles.gamma.begin());
    if (!o.steps_path.empty()) o.cfg.custom_steps = read_steps(o.steps_path);
    if (o.forward_only) o.cfg.backward = false;
    if (o.backward_only) o.cfg.forward = false;
    if (o.scale_opt && o.scale_opt->count() > 0) o.cfg.scale_pev_per_hhz = o.scale_in;
    if (!o.config_path.empty()) apply_config_file(o.cfg, o.config_path);
}

std::string out_path(const CommonOpts &o, const std::string &name) {
    std::error_code ec;
    fs::create_directories(o.outdir, ec);
    if (ec) throw io_error("cannot create output directory '" + o.outdir + "'");
    return (fs::path(o.outdir) / name).string();
}

std::string kt_token(double kt) { return fmt_double(kt); }

std::optional<std::size_t> kt_index(const std::vector<double> &temps, double kt) {
    for (std::size_t i = 0; i < temps.size(); ++i) {
        if (std::isinf(temps[i]) && std::isinf(kt) && temps[i] * kt > 0) return i;
        if (std::abs(temps[i] - kt) <= 1e-9 * std::max(1.0, std::abs(kt))) return i;
    }
    return std::nullopt;
}

bool has_direction(const Dataset &ds, Direction d) {
    for (const auto &r : ds.records)
        if (r.direction == d) return true;
    return false;
}

std::string fixed6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

// ---------------------------------------------------------------------------

void cmd_simulate(CommonOpts &o) {
    finalize(o);
    Scenario sc = make_scenario(o.cfg);
    Dataset ds = simulated_dataset(sc);
    const std::string path = out_path(o, "dataset.jsonl");
    write_dataset(path, ds);
    std::cout << "wrote " << path << " (" << ds.records.size() << " records, "
              << ds.populations.size() << " preparations)\n";
}

void cmd_invert(CommonOpts &o, const std::string &dataset_path) {
    finalize(o);
    Dataset ds = read_dataset(dataset_path);
    Scenario sc = make_scenario(o.cfg);
    std::vector<InversionReport> reps;
    for (Direction dir : {Direction::forward, Direction::backward}) {
        const bool wanted = dir == Direction::forward ? o.cfg.forward : o.cfg.backward;
        if (!wanted || !has_direction(ds, dir)) continue;
        reps.push_back(invert_pipeline(ds, sc.table, dir, o.cfg.inversion_options()));
    }
    if (reps.empty())
        throw validation_error("dataset has no records for the requested directions");
    const std::string path = out_path(o, "inversion.json");
    write_inversions(path, reps);
    for (const auto &r : reps) {
        std::cout << to_string(r.direction) << ": " << (r.mle.converged ? "converged" : "NOT CONVERGED")
                  << " in " << r.mle.iterations << " iterations, cond " << fmt_double(r.solve.condition_number)
                  << ", bistochastic dev " << fmt_double(r.mle.bistochastic_dev) << "\n";
        if (!r.mle.converged)
            std::cerr << "warning: " << to_string(r.direction)
                      << " reconstruction carries the non-converged flag\n";
    }
    std::cout << "wrote " << path << "\n";
}

void cmd_workdist(CommonOpts &o, const std::string &report_path, const std::string &dataset_path) {
    finalize(o);
    const auto recs = read_inversions(report_path);
    Dataset ds = read_dataset(dataset_path);
    Scenario sc = make_scenario(o.cfg);
    int written = 0;
    for (const auto &rec : recs) {
        const TransitionMatrix t = rec.reconstructed();
        bool any = false;
        for (const auto &blk : ds.populations) {
            if (blk.direction != rec.direction) continue;
            any = true;
            WorkDistribution wd = work_distribution(blk.pops, t, sc.table);
            const double total = wd.total();
            if (std::abs(total - 1.0) > 1e-6)
                throw numerical_error(std::string("work distribution for ") + to_string(rec.direction) +
                                      " kT " + kt_token(blk.pops.kt_pev) + " sums to " +
                                      fmt_double(total));
            const std::string name = std::string("workdist_") + to_string(rec.direction) + "_kT" +
                                     kt_token(blk.pops.kt_pev) + ".tsv";
            write_workdist(out_path(o, name), wd, sc.scale);
            ++written;
            std::cout << "wrote " << (fs::path(o.outdir) / name).string() << " (" << wd.mass.size()
                      << " bins, total " << fmt_double(total) << ")\n";
        }
        if (!any)
            throw validation_error(std::string("dataset has no preparation populations for direction '") +
                                   to_string(rec.direction) + "'");
    }
    (void)written;
}

void cmd_crooks(CommonOpts &o, const std::string &forward_path, const std::string &backward_path) {
    finalize(o);
    const EnergyScale scale = o.cfg.scale();
    WorkDistribution df = read_workdist(forward_path, scale);
    WorkDistribution db = read_workdist(backward_path, scale);
    if (df.direction != Direction::forward)
        throw validation_error("'" + forward_path + "' is not a forward distribution");
    if (db.direction != Direction::backward)
        throw validation_error("'" + backward_path + "' is not a backward distribution");

    FitDocument doc;
    doc.kt_prep_pev = df.kt_pev;
    doc.mismatched_preparation = !kt_index({df.kt_pev}, db.kt_pev).has_value();
    if (doc.mismatched_preparation)
        std::cerr << "warning: preparation temperatures differ (forward kT " << kt_token(df.kt_pev)
                  << " peV, backward kT " << kt_token(db.kt_pev) << " peV)\n";

    const CrooksPoints cp = crooks_points(df, db, kRatioMassFloor);
    doc.unpaired_w_hhz = cp.unpaired_forward_w;

    if (o.cfg.sigma > 0 && o.cfg.trials >= 2) {
        o.cfg.validate(true);
        const auto idx = kt_index(o.cfg.temperatures_pev, df.kt_pev);
        if (!idx) {
            std::cerr << "warning: kT " << kt_token(df.kt_pev)
                      << " peV is not a configured temperature; fitting unweighted\n";
            for (const auto &[w, lr] : cp.points) doc.points.push_back({scale.to_pev(w), lr, 1.0});
        } else {
            Scenario sc = make_scenario(o.cfg);
            const UncertaintyTable tbl =
                propagate_errors(sc.noiseless, sc.table, o.cfg.sigma, o.cfg.trials, o.cfg.master_seed,
                                 "sigma-table", o.cfg.inversion_options());
            const int min_count = std::max(2, o.cfg.trials / 10);
            doc.points = ratio_points_with_sigma(cp, tbl, *idx, scale, min_count);
            for (const auto &[w, lr] : cp.points)
                if (!tbl.sigma_for(*idx, w, min_count)) doc.dropped_w_hhz.push_back(w);
        }
    } else {
        for (const auto &[w, lr] : cp.points) doc.points.push_back({scale.to_pev(w), lr, 1.0});
    }

    doc.fit = fit_fluctuation(doc.points);
    const std::string fit_name = "crooks_kT" + kt_token(df.kt_pev) + ".json";
    const std::string plot_name = "plot_kT" + kt_token(df.kt_pev) + ".tsv";
    write_fit(out_path(o, fit_name), doc);
    write_plot(out_path(o, plot_name), doc);
    std::cout << "kT from fit: " << fmt_double(doc.fit.kt_pev) << " +/- " << fmt_double(doc.fit.kt_sigma_pev)
              << " peV (slope " << fmt_double(doc.fit.slope) << ", " << doc.fit.n_points << " points, "
              << doc.fit.n_excluded << " excluded)\n";
    std::cout << "wrote " << (fs::path(o.outdir) / fit_name).string() << " and "
              << (fs::path(o.outdir) / plot_name).string() << "\n";
}

void cmd_report(CommonOpts &o) {
    finalize(o);
    const fs::path dir(o.outdir);
    const fs::path dataset_path = dir / "dataset.jsonl";
    const fs::path inversion_path = dir / "inversion.json";
    std::vector<std::string> missing;
    if (!fs::exists(dataset_path)) missing.push_back("dataset.jsonl");
    if (!fs::exists(inversion_path)) missing.push_back("inversion.json");
    if (!missing.empty()) {
        std::string m = "report: missing required input(s) in '" + o.outdir + "':";
        for (const auto &s : missing) m += " " + s;
        throw io_error(m);
    }
    Dataset ds = read_dataset(dataset_path.string());
    const auto recs = read_inversions(inversion_path.string());
    Scenario sc = make_scenario(o.cfg);

    std::ostringstream out;
    out << "# workrecon.summary v1\n\n";

    out << "[spectrum]\n";
    out << "index  state  E_hHz        E_peV\n";
    for (int i = 0; i < 4; ++i)
        out << i << "      |" << sc.table.labels[i].arrows() << ">  "
            << fixed6(sc.table.energies_hhz[i]) << "  " << fixed6(sc.scale.to_pev(sc.table.energies_hhz[i]))
            << "\n";
    out << "\n";

    const InversionRecord *fwd = nullptr, *bwd = nullptr;
    for (const auto &r : recs) (r.direction == Direction::forward ? fwd : bwd) = &r;

    for (Direction dirn : {Direction::forward, Direction::backward}) {
        const InversionRecord *rec = dirn == Direction::forward ? fwd : bwd;
        out << "[transition " << to_string(dirn) << "]\n";
        if (!rec) {
            out << "absent\n\n";
            continue;
        }
        const Eigen::MatrixXd &oracle =
            dirn == Direction::forward ? sc.oracle_forward.p : sc.oracle_backward.p;
        out << "oracle" << std::string(30, ' ') << "| reconstructed\n";
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) out << fixed6(oracle(i, j)) << " ";
            out << "| ";
            for (int j = 0; j < 4; ++j) out << fixed6(rec->projected(i, j)) << " ";
            out << "\n";
        }
        out << "max |oracle - reconstructed|: "
            << fmt_double((oracle - rec->projected).cwiseAbs().maxCoeff()) << "\n";
        out << "converged: " << (rec->converged ? "yes" : "NO") << " (" << rec->iterations
            << " iterations, cond " << fixed6(rec->condition_number) << ", rank " << rec->rank << ")\n\n";
    }

    out << "[micro-reversibility]\n";
    if (fwd && bwd) {
        const Eigen::MatrixXd dev = (fwd->projected - bwd->projected.transpose()).cwiseAbs();
        out << "|P_fwd(m|n) - P_bwd(n|m)|\n";
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) out << fixed6(dev(i, j)) << " ";
            out << "\n";
        }
        out << "max deviation: " << fmt_double(dev.maxCoeff()) << "\n\n";
    } else {
        out << "needs both directions; " << (fwd ? "backward" : "forward") << " absent\n\n";
    }

    out << "[temperatures]\n";
    out << "kT_prep_peV  kT_from_populations_peV  kT_from_fit_peV  fit_sigma_peV  points  excluded\n";
    bool have_fwd_pops = false;
    for (const auto &blk : ds.populations)
        if (blk.direction == Direction::forward) have_fwd_pops = true;
    const Direction pop_dir = have_fwd_pops ? Direction::forward : Direction::backward;
    for (const auto &blk : ds.populations) {
        if (blk.direction != pop_dir) continue;
        const KtEstimate est = kt_from_populations(blk.pops, sc.table, sc.scale);
        std::string pop_kt;
        switch (est.tag) {
            case KtEstimate::Tag::infinite: pop_kt = "inf"; break;
            case KtEstimate::Tag::negative: pop_kt = fixed6(est.kt_pev) + " (negative)"; break;
            default: pop_kt = fixed6(est.kt_pev);
        }
        const fs::path fit_path = dir / ("crooks_kT" + kt_token(blk.pops.kt_pev) + ".json");
        std::string fit_kt = "-", fit_sig = "-", pts = "-", excl = "-";
        if (fs::exists(fit_path)) {
            const FitSummary fitsum = read_fit(fit_path.string());
            fit_kt = fixed6(fitsum.kt_pev);
            if (fitsum.mismatched_preparation) fit_kt += " (mismatched pair)";
            fit_sig = fixed6(fitsum.kt_sigma_pev);
            pts = std::to_string(fitsum.n_points);
            excl = std::to_string(fitsum.n_excluded);
        }
        out << kt_token(blk.pops.kt_pev) << "  " << pop_kt << "  " << fit_kt << "  " << fit_sig << "  "
            << pts << "  " << excl << "\n";
    }

    const std::string path = out_path(o, "summary.txt");
    write_text_file(path, out.str());
    std::cout << out.str();
    std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"two-qubit work-statistics reconstruction toolkit"};
    app.require_subcommand(1);

    CommonOpts sim_o, inv_o, wd_o, cr_o, rep_o;
    std::string inv_dataset, wd_report, wd_dataset, cr_forward, cr_backward;

    auto *sim = app.add_subcommand("simulate", "simulate observable records for the configured run");
    add_common(sim, sim_o);
    sim->callback([&] { cmd_simulate(sim_o); });

    auto *inv = app.add_subcommand("invert", "reconstruct transition matrices from a dataset");
    add_common(inv, inv_o);
    inv->add_option("dataset", inv_dataset, "dataset file (JSONL)")->required();
    inv->callback([&] { cmd_invert(inv_o, inv_dataset); });

    auto *wd = app.add_subcommand("workdist", "build work distributions from an inversion report");
    add_common(wd, wd_o);
    wd->add_option("report", wd_report, "inversion report (JSON)")->required();
    wd->add_option("populations", wd_dataset, "dataset file carrying the preparations")->required();
    wd->callback([&] { cmd_workdist(wd_o, wd_report, wd_dataset); });

    auto *cr = app.add_subcommand("crooks", "fit the fluctuation relation to a distribution pair");
    add_common(cr, cr_o);
    cr->add_option("forward", cr_forward, "forward work distribution (TSV)")->required();
    cr->add_option("backward", cr_backward, "backward work distribution (TSV)")->required();
    cr->callback([&] { cmd_crooks(cr_o, cr_forward, cr_backward); });

    auto *rep = app.add_subcommand("report", "write a summary of the artifacts in the output directory");
    add_common(rep, rep_o);
    rep->callback([&] { cmd_report(rep_o); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const validation_error &e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const io_error &e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
