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

#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "workrecon/pipeline.hpp"

namespace workrecon {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Primitives. All numbers are written in shortest round-trip decimal form so
// reruns are byte-identical and parse back to the same bits; non-finite
// temperatures (infinite-kT preparations are legal) are spelled out.
// ---------------------------------------------------------------------------

inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return json(x).dump();
}

inline json json_number(double x) {
    if (std::isfinite(x)) return json(x);
    return json(fmt_double(x));
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("failed reading '" + path + "'");
    return ss.str();
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw io_error("failed writing '" + path + "'");
}

inline Direction direction_from_string(const std::string &s) {
    if (s == "forward") return Direction::forward;
    if (s == "backward") return Direction::backward;
    throw validation_error("unknown direction '" + s + "'");
}

namespace detail {

inline std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur);
    return lines;
}

inline const json &require_field(const json &j, const char *field, const std::string &where) {
    auto it = j.find(field);
    if (it == j.end()) throw io_error(where + ": missing field '" + field + "'");
    return *it;
}

inline double number_field(const json &j, const char *field, const std::string &where) {
    const json &v = require_field(j, field, where);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw io_error(where + ": field '" + field + "' must be a number");
}

inline std::string string_field(const json &j, const char *field, const std::string &where) {
    const json &v = require_field(j, field, where);
    if (!v.is_string()) throw io_error(where + ": field '" + field + "' must be a string");
    return v.get<std::string>();
}

inline json parse_json(const std::string &text, const std::string &where) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw io_error(where + ": invalid JSON");
    return j;
}

inline double strict_double(const std::string &tok, const std::string &where) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception &) {
        throw io_error(where + ": '" + tok + "' is not a number");
    }
    if (pos != tok.size()) throw io_error(where + ": '" + tok + "' is not a number");
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dataset: one JSON object per line under a versioned header.
// ---------------------------------------------------------------------------

inline std::string dataset_to_text(const Dataset &ds) {
    std::ostringstream out;
    out << R"({"format":"workrecon.dataset","version":1})" << "\n";
    for (const auto &blk : ds.populations) {
        json j;
        j["type"] = "populations";
        j["direction"] = to_string(blk.direction);
        j["kT_peV"] = json_number(blk.pops.kt_pev);
        j["kT_hHz"] = json_number(blk.pops.kt_hhz);
        j["p"] = {blk.pops.p[0], blk.pops.p[1], blk.pops.p[2], blk.pops.p[3]};
        out << j.dump() << "\n";
    }
    for (const auto &r : ds.records) {
        json j;
        j["type"] = "record";
        j["observable"] = to_string(r.observable);
        j["direction"] = to_string(r.direction);
        j["kT_peV"] = json_number(r.kt_pev);
        j["mean"] = r.mean;
        j["stderr"] = r.stderr_;
        out << j.dump() << "\n";
    }
    json meta;
    meta["type"] = "meta";
    meta["origin"] = to_string(ds.origin);
    if (ds.noise_seed) meta["seed"] = *ds.noise_seed;
    out << meta.dump() << "\n";
    return out.str();
}

inline void write_dataset(const std::string &path, const Dataset &ds) {
    write_text_file(path, dataset_to_text(ds));
}

inline Dataset dataset_from_text(const std::string &text, const std::string &name = "dataset") {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw io_error(name + ": empty file");
    const std::string head_where = name + " line 1";
    const json head = detail::parse_json(lines[0], head_where);
    if (detail::string_field(head, "format", head_where) != "workrecon.dataset")
        throw io_error(head_where + ": not a workrecon.dataset file");
    if (detail::require_field(head, "version", head_where) != 1)
        throw io_error(head_where + ": unsupported version");

    Dataset ds;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const std::string where = name + " line " + std::to_string(i + 1);
        const json j = detail::parse_json(lines[i], where);
        const std::string type = detail::string_field(j, "type", where);
        try {
            if (type == "populations") {
                PopulationBlock blk;
                blk.direction = direction_from_string(detail::string_field(j, "direction", where));
                blk.pops.kt_pev = detail::number_field(j, "kT_peV", where);
                blk.pops.kt_hhz = detail::number_field(j, "kT_hHz", where);
                const json &p = detail::require_field(j, "p", where);
                if (!p.is_array() || p.size() != 4)
                    throw io_error(where + ": field 'p' must be an array of 4 numbers");
                for (int k = 0; k < 4; ++k) blk.pops.p[k] = p[k].get<double>();
                blk.pops.validate();
                ds.populations.push_back(blk);
            } else if (type == "record") {
                ObservableRecord r;
                r.observable = observable_from_string(detail::string_field(j, "observable", where));
                r.direction = direction_from_string(detail::string_field(j, "direction", where));
                r.kt_pev = detail::number_field(j, "kT_peV", where);
                r.mean = detail::number_field(j, "mean", where);
                r.stderr_ = detail::number_field(j, "stderr", where);
                r.validate();
                ds.records.push_back(r);
            } else if (type == "meta") {
                const std::string origin = detail::string_field(j, "origin", where);
                if (origin == "simulated")
                    ds.origin = DataOrigin::simulated;
                else if (origin == "ingested")
                    ds.origin = DataOrigin::ingested;
                else
                    throw io_error(where + ": unknown origin '" + origin + "'");
                if (j.contains("seed")) ds.noise_seed = j["seed"].get<std::uint64_t>();
            } else {
                throw io_error(where + ": unknown record type '" + type + "'");
            }
        } catch (const validation_error &e) {
            throw io_error(where + ": " + e.what());
        }
    }
    ds.validate();
    return ds;
}

inline Dataset read_dataset(const std::string &path) {
    return dataset_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Pulse step lists: a minimal line format for swapping drives in and out.
// ---------------------------------------------------------------------------

inline std::string steps_to_text(const std::vector<PulseStep> &steps) {
    std::ostringstream out;
    out << "# workrecon.steps v1\n";
    for (const auto &s : steps) {
        if (s.kind == PulseStep::Kind::rotation)
            out << "rotation " << s.axis << " " << s.qubit << " " << fmt_double(s.angle) << "\n";
        else
            out << "free_evolution " << fmt_double(s.duration) << "\n";
    }
    return out.str();
}

inline std::vector<PulseStep> steps_from_text(const std::string &text, const std::string &name = "steps") {
    std::vector<PulseStep> steps;
    const auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string &line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        const std::string where = name + " line " + std::to_string(i + 1);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok[0] == "rotation") {
            if (tok.size() != 4)
                throw io_error(where + ": expected 'rotation <axis> <qubit> <angle>'");
            if (tok[1].size() != 1 || tok[2].size() != 1)
                throw io_error(where + ": axis and qubit must be single characters");
            PulseStep s;
            s.kind = PulseStep::Kind::rotation;
            s.axis = tok[1][0];
            s.qubit = tok[2][0];
            s.angle = detail::strict_double(tok[3], where + ", field angle");
            steps.push_back(s);
        } else if (tok[0] == "free_evolution") {
            if (tok.size() != 2) throw io_error(where + ": expected 'free_evolution <seconds>'");
            PulseStep s;
            s.kind = PulseStep::Kind::free_evolution;
            s.duration = detail::strict_double(tok[1], where + ", field duration");
            steps.push_back(s);
        } else {
            throw io_error(where + ": unknown step '" + tok[0] + "'");
        }
    }
    if (steps.empty()) throw io_error(name + ": no steps found");
    return steps;
}

inline void write_steps(const std::string &path, const std::vector<PulseStep> &steps) {
    write_text_file(path, steps_to_text(steps));
}

inline std::vector<PulseStep> read_steps(const std::string &path) {
    return steps_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Inversion reports: one JSON document holding every direction.
// ---------------------------------------------------------------------------

namespace detail {
inline json matrix_to_json(const Eigen::MatrixXd &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json &j, const std::string &where) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw io_error(where + ": expected an array of rows");
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != c)
            throw io_error(where + ": ragged matrix rows");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    }
    return m;
}
}  // namespace detail

inline json inversion_to_json(const InversionReport &rep) {
    json j;
    j["direction"] = to_string(rep.direction);
    j["x"] = std::vector<double>(rep.x.data(), rep.x.data() + rep.x.size());
    j["raw"] = detail::matrix_to_json(rep.raw);
    j["projected"] = detail::matrix_to_json(rep.mle.projected);
    j["iterations"] = rep.mle.iterations;
    j["final_change"] = rep.mle.final_change;
    j["converged"] = rep.mle.converged;
    j["inner_exhausted"] = rep.mle.inner_exhausted;
    j["bistochastic_dev"] = rep.mle.bistochastic_dev;
    json clamped = json::array();
    for (const auto &[a, b] : rep.mle.clamped) clamped.push_back({a, b});
    j["clamped"] = clamped;
    j["condition_number"] = rep.solve.condition_number;
    j["rank"] = rep.solve.rank;
    j["rank_deficient"] = rep.solve.rank_deficient;
    j["cond_warning"] = rep.solve.cond_warning;
    j["residual_norm"] = rep.solve.residual_norm;
    j["note"] = rep.solve.note;
    j["uninformative_rows"] = rep.system.uninformative_rows;
    json rows = json::array();
    for (const auto &r : rep.system.rows) {
        json row;
        row["observable"] = to_string(r.observable);
        row["kT_peV"] = json_number(r.kt_pev);
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

// The subset of an inversion report that downstream commands need back.
struct InversionRecord {
    Direction direction = Direction::forward;
    Eigen::MatrixXd raw, projected;
    int iterations = 0;
    bool converged = false;
    double condition_number = 0;
    int rank = 0;
    double bistochastic_dev = 0;
    std::vector<double> kt_pev;  // distinct preparation temperatures, file order

    TransitionMatrix reconstructed() const {
        return TransitionMatrix{projected, direction, Provenance::reconstructed};
    }
};

inline std::string inversions_to_text(const std::vector<InversionReport> &reps) {
    json doc;
    doc["format"] = "workrecon.inversion";
    doc["version"] = 1;
    json arr = json::array();
    for (const auto &r : reps) arr.push_back(inversion_to_json(r));
    doc["reports"] = arr;
    return doc.dump(2) + "\n";
}

inline void write_inversions(const std::string &path, const std::vector<InversionReport> &reps) {
    write_text_file(path, inversions_to_text(reps));
}

inline std::vector<InversionRecord> inversions_from_text(const std::string &text,
                                                         const std::string &name = "inversion") {
    const json doc = detail::parse_json(text, name);
    if (detail::string_field(doc, "format", name) != "workrecon.inversion")
        throw io_error(name + ": not a workrecon.inversion file");
    if (detail::require_field(doc, "version", name) != 1)
        throw io_error(name + ": unsupported version");
    const json &arr = detail::require_field(doc, "reports", name);
    if (!arr.is_array()) throw io_error(name + ": field 'reports' must be an array");
    std::vector<InversionRecord> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string where = name + " report " + std::to_string(i);
        const json &j = arr[i];
        InversionRecord rec;
        rec.direction = direction_from_string(detail::string_field(j, "direction", where));
        rec.raw = detail::matrix_from_json(detail::require_field(j, "raw", where), where);
        rec.projected = detail::matrix_from_json(detail::require_field(j, "projected", where), where);
        rec.iterations = detail::require_field(j, "iterations", where).get<int>();
        rec.converged = detail::require_field(j, "converged", where).get<bool>();
        rec.condition_number = detail::number_field(j, "condition_number", where);
        rec.rank = detail::require_field(j, "rank", where).get<int>();
        rec.bistochastic_dev = detail::number_field(j, "bistochastic_dev", where);
        for (const json &row : detail::require_field(j, "rows", where)) {
            const double kt = detail::number_field(row, "kT_peV", where);
            bool seen = false;
            for (double v : rec.kt_pev) seen = seen || v == kt;
            if (!seen) rec.kt_pev.push_back(kt);
        }
        out.push_back(std::move(rec));
    }
    if (out.empty()) throw io_error(name + ": no reports");
    return out;
}

inline std::vector<InversionRecord> read_inversions(const std::string &path) {
    return inversions_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Work distributions: flat tab-separated records, one file per
// (direction, temperature).
// ---------------------------------------------------------------------------

inline std::string workdist_to_text(const WorkDistribution &wd, const EnergyScale &scale = {}) {
    std::ostringstream out;
    out << "# workrecon.workdist v1\n";
    out << "W_hHz\tW_peV\tprob\tdirection\tkT_peV\n";
    for (const auto &[w, p] : wd.mass)
        out << fmt_double(w) << "\t" << fmt_double(scale.to_pev(w)) << "\t" << fmt_double(p) << "\t"
            << to_string(wd.direction) << "\t" << fmt_double(wd.kt_pev) << "\n";
    return out.str();
}

inline void write_workdist(const std::string &path, const WorkDistribution &wd,
                           const EnergyScale &scale = {}) {
    write_text_file(path, workdist_to_text(wd, scale));
}

inline WorkDistribution workdist_from_text(const std::string &text, const EnergyScale &scale = {},
                                           const std::string &name = "workdist") {
    const auto lines = detail::split_lines(text);
    if (lines.empty() || lines[0] != "# workrecon.workdist v1")
        throw io_error(name + " line 1: not a workrecon.workdist file");
    WorkDistribution wd;
    bool saw_any = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string &line = lines[i];
        if (line.empty() || line[0] == '#' || line.rfind("W_hHz", 0) == 0) continue;
        const std::string where = name + " line " + std::to_string(i + 1);
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; std::getline(ss, t, '\t');) tok.push_back(t);
        if (tok.size() != 5)
            throw io_error(where + ": expected 5 tab-separated fields, got " +
                           std::to_string(tok.size()));
        const double w = detail::strict_double(tok[0], where + ", field W_hHz");
        const double p = detail::strict_double(tok[2], where + ", field prob");
        Direction dir;
        try {
            dir = direction_from_string(tok[3]);
        } catch (const validation_error &e) {
            throw io_error(where + ": " + e.what());
        }
        const double kt = detail::strict_double(tok[4], where + ", field kT_peV");
        if (!saw_any) {
            wd.direction = dir;
            wd.kt_pev = kt;
            wd.kt_hhz = scale.to_hhz(kt);
            saw_any = true;
        } else if (dir != wd.direction || kt != wd.kt_pev) {
            throw io_error(where + ": mixed direction or kT within one distribution file");
        }
        wd.mass.emplace_back(w, p);
    }
    if (!saw_any) throw io_error(name + ": no mass rows");
    return wd;
}

inline WorkDistribution read_workdist(const std::string &path, const EnergyScale &scale = {}) {
    return workdist_from_text(read_text_file(path), scale, path);
}

// ---------------------------------------------------------------------------
// Fit documents and plot-ready flat files.
// ---------------------------------------------------------------------------

struct FitDocument {
    double kt_prep_pev = 0;         // preparation temperature of the input pair
    bool mismatched_preparation = false;
    FitResult fit;
    std::vector<RatioPoint> points;          // the fitted points, input order
    std::vector<double> unpaired_w_hhz;      // forward support without a partner
    std::vector<double> dropped_w_hhz;       // paired but without a usable sigma
};

inline std::string fit_to_text(const FitDocument &doc) {
    json j;
    j["format"] = "workrecon.fit";
    j["version"] = 1;
    j["kT_prep_peV"] = json_number(doc.kt_prep_pev);
    j["mismatched_preparation"] = doc.mismatched_preparation;
    j["slope_per_peV"] = doc.fit.slope;
    j["intercept"] = doc.fit.intercept;
    j["slope_stderr"] = doc.fit.slope_stderr;
    j["intercept_stderr"] = doc.fit.intercept_stderr;
    j["kT_peV"] = json_number(doc.fit.kt_pev);
    j["kT_sigma_peV"] = json_number(doc.fit.kt_sigma_pev);
    j["confidence"] = doc.fit.confidence;
    j["n_points"] = doc.fit.n_points;
    j["n_excluded"] = doc.fit.n_excluded;
    j["excluded_W_peV"] = doc.fit.excluded_w;
    j["dof"] = doc.fit.dof;
    j["s2"] = json_number(doc.fit.s2);
    j["unpaired_W_hHz"] = doc.unpaired_w_hhz;
    j["dropped_W_hHz"] = doc.dropped_w_hhz;
    return j.dump(2) + "\n";
}

inline void write_fit(const std::string &path, const FitDocument &doc) {
    write_text_file(path, fit_to_text(doc));
}

struct FitSummary {
    double kt_prep_pev = 0;
    double kt_pev = 0;
    double kt_sigma_pev = 0;
    double slope = 0;
    double intercept = 0;
    int n_points = 0;
    int n_excluded = 0;
    bool mismatched_preparation = false;
};

inline FitSummary fit_from_text(const std::string &text, const std::string &name = "fit") {
    const json j = detail::parse_json(text, name);
    if (detail::string_field(j, "format", name) != "workrecon.fit")
        throw io_error(name + ": not a workrecon.fit file");
    FitSummary s;
    s.kt_prep_pev = detail::number_field(j, "kT_prep_peV", name);
    s.kt_pev = detail::number_field(j, "kT_peV", name);
    s.kt_sigma_pev = detail::number_field(j, "kT_sigma_peV", name);
    s.slope = detail::number_field(j, "slope_per_peV", name);
    s.intercept = detail::number_field(j, "intercept", name);
    s.n_points = detail::require_field(j, "n_points", name).get<int>();
    s.n_excluded = detail::require_field(j, "n_excluded", name).get<int>();
    s.mismatched_preparation = detail::require_field(j, "mismatched_preparation", name).get<bool>();
    return s;
}

inline FitSummary read_fit(const std::string &path) { return fit_from_text(read_text_file(path), path); }

// One row per ratio point: observed value, fitted line and the fit's
// prediction band, plus whether the point was excluded from the fit.
inline std::string plot_to_text(const FitDocument &doc) {
    std::ostringstream out;
    out << "# workrecon.fitplot v1\n";
    out << "W_peV\tln_ratio\tsigma\tfitted\tband_lo\tband_hi\texcluded\n";
    for (const auto &pt : doc.points) {
        const double fitted = doc.fit.intercept + doc.fit.slope * pt.w_pev;
        const double half = doc.fit.prediction_half_width(pt.w_pev, pt.sigma);
        bool excl = false;
        for (double w : doc.fit.excluded_w) excl = excl || w == pt.w_pev;
        out << fmt_double(pt.w_pev) << "\t" << fmt_double(pt.ln_ratio) << "\t" << fmt_double(pt.sigma)
            << "\t" << fmt_double(fitted) << "\t" << fmt_double(fitted - half) << "\t"
            << fmt_double(fitted + half) << "\t" << (excl ? 1 : 0) << "\n";
    }
    return out.str();
}

inline void write_plot(const std::string &path, const FitDocument &doc) {
    write_text_file(path, plot_to_text(doc));
}

// ---------------------------------------------------------------------------
// Config files: a flat JSON object whose present keys override flag values.
// ---------------------------------------------------------------------------

inline void apply_config_json(RunConfig &cfg, const json &j, const std::string &name = "config") {
    if (!j.is_object()) throw io_error(name + ": config must be a JSON object");
    for (const auto &[key, val] : j.items()) {
        try {
            if (key == "dnu_h_hz")
                cfg.hamiltonian.dnu_h = val.get<double>();
            else if (key == "dnu_c_hz")
                cfg.hamiltonian.dnu_c = val.get<double>();
            else if (key == "j_hz")
                cfg.hamiltonian.j_coupling = val.get<double>();
            else if (key == "alpha") {
                if (!val.is_array() || val.size() != 6)
                    throw io_error(name + ": field 'alpha' must be an array of 6 angles");
                for (int i = 0; i < 6; ++i) cfg.angles.alpha[i] = val[i].get<double>();
            } else if (key == "gamma") {
                if (!val.is_array() || val.size() != 6)
                    throw io_error(name + ": field 'gamma' must be an array of 6 angles");
                for (int i = 0; i < 6; ++i) cfg.angles.gamma[i] = val[i].get<double>();
            } else if (key == "steps_file")
                cfg.custom_steps = read_steps(val.get<std::string>());
            else if (key == "temperatures_pev") {
                cfg.temperatures_pev.clear();
                for (const json &t : val) cfg.temperatures_pev.push_back(t.get<double>());
            } else if (key == "sigma")
                cfg.sigma = val.get<double>();
            else if (key == "seed")
                cfg.master_seed = val.get<std::uint64_t>();
            else if (key == "trials")
                cfg.trials = val.get<int>();
            else if (key == "mle_tol")
                cfg.mle_tol = val.get<double>();
            else if (key == "mle_max_iter")
                cfg.mle_max_iter = val.get<int>();
            else if (key == "forward")
                cfg.forward = val.get<bool>();
            else if (key == "backward")
                cfg.backward = val.get<bool>();
            else if (key == "j_zero")
                cfg.j_zero = val.get<bool>();
            else if (key == "scale_pev_per_hhz")
                cfg.scale_pev_per_hhz = val.get<double>();
            else
                throw io_error(name + ": unknown key '" + key + "'");
        } catch (const json::exception &e) {
            throw io_error(name + ": bad value for key '" + key + "': " + e.what());
        }
    }
}

inline void apply_config_file(RunConfig &cfg, const std::string &path) {
    apply_config_json(cfg, detail::parse_json(read_text_file(path), path), path);
}

}  // namespace workrecon
