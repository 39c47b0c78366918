#include "tdsmps/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tdsmps/errors.hpp"
#include "tdsmps/theory.hpp"

namespace tdsmps {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) {
        throw ParseError(where + " must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!known) {
            throw ParseError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + "." + key + ": " + e.what());
    }
}

ModelSpec model_from_json(const json& j) {
    check_keys(j,
               {"kind", "length", "delta", "spin", "theta", "hopping", "interaction", "chemical_potential",
                "n_max"},
               "model");
    ModelSpec m;
    std::string kind = to_string(m.kind);
    read_opt(j, "kind", kind, "model");
    try {
        m.kind = parse_model_kind(kind);
    } catch (const std::exception& e) {
        throw ParseError(std::string("model.kind: ") + e.what());
    }
    read_opt(j, "length", m.length, "model");
    read_opt(j, "delta", m.delta, "model");
    read_opt(j, "spin", m.spin, "model");
    read_opt(j, "theta", m.theta, "model");
    read_opt(j, "hopping", m.hopping, "model");
    read_opt(j, "interaction", m.interaction, "model");
    read_opt(j, "chemical_potential", m.chemical_potential, "model");
    read_opt(j, "n_max", m.n_max, "model");
    if (m.length < 2) {
        throw ParseError("model.length must be at least 2");
    }
    return m;
}

json model_to_json(const ModelSpec& m) {
    return {{"kind", to_string(m.kind)},
            {"length", m.length},
            {"delta", m.delta},
            {"spin", m.spin},
            {"theta", m.theta},
            {"hopping", m.hopping},
            {"interaction", m.interaction},
            {"chemical_potential", m.chemical_potential},
            {"n_max", m.n_max}};
}

std::string alpha_label(double a) { return fmt::format("S_a{:g}", a); }

std::string num(double x) { return fmt::format("{:.17g}", x); }

double parse_double(const std::string& s, long line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ParseError("trailing characters in number '" + s + "'", line);
        }
        return v;
    } catch (const std::invalid_argument&) {
        throw ParseError("not a number: '" + s + "'", line);
    } catch (const std::out_of_range&) {
        // Denormal or huge values are still representable enough for results.
        return std::strtod(s.c_str(), nullptr);
    }
}

long parse_long(const std::string& s, long line) {
    try {
        std::size_t used = 0;
        const long v = std::stol(s, &used);
        if (used != s.size()) {
            throw ParseError("trailing characters in integer '" + s + "'", line);
        }
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("not an integer: '" + s + "'", line);
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig config_from_json(const json& j) {
    check_keys(j,
               {"schema_version", "name", "model", "evolution", "alphas", "epsilons", "bonds", "track_all_bonds",
                "output_dir", "seed", "budget", "analysis"},
               "config");
    ExperimentConfig c;
    read_opt(j, "schema_version", c.schema_version, "config");
    if (c.schema_version != config_schema_version) {
        throw ParseError("unsupported config schema_version " + std::to_string(c.schema_version));
    }
    read_opt(j, "name", c.name, "config");
    if (j.contains("model")) {
        c.model = model_from_json(j.at("model"));
    }
    if (j.contains("evolution")) {
        const json& e = j.at("evolution");
        check_keys(e, {"dtau", "order", "max_rank", "rel_weight_cutoff", "betas", "beta_grid"}, "evolution");
        read_opt(e, "dtau", c.evolution.dtau, "evolution");
        read_opt(e, "order", c.evolution.order, "evolution");
        read_opt(e, "max_rank", c.evolution.max_rank, "evolution");
        read_opt(e, "rel_weight_cutoff", c.evolution.rel_weight_cutoff, "evolution");
        if (e.contains("betas") && e.contains("beta_grid")) {
            throw ParseError("evolution: give either 'betas' or 'beta_grid', not both");
        }
        read_opt(e, "betas", c.evolution.grid.values, "evolution");
        if (e.contains("betas") && c.evolution.grid.values.empty()) {
            throw ParseError("evolution.betas must not be empty");
        }
        if (e.contains("beta_grid")) {
            const json& g = e.at("beta_grid");
            check_keys(g, {"min", "max", "count", "spacing", "include_zero"}, "evolution.beta_grid");
            auto& grid = c.evolution.grid;
            read_opt(g, "min", grid.min, "beta_grid");
            read_opt(g, "max", grid.max, "beta_grid");
            read_opt(g, "count", grid.count, "beta_grid");
            read_opt(g, "spacing", grid.spacing, "beta_grid");
            read_opt(g, "include_zero", grid.include_zero, "beta_grid");
            if (grid.spacing != "log" && grid.spacing != "linear") {
                throw ParseError("beta_grid.spacing must be 'log' or 'linear'");
            }
            if (!(grid.min > 0) || !(grid.max >= grid.min) || grid.count < 1) {
                throw ParseError("beta_grid needs 0 < min <= max and count >= 1");
            }
        }
        if (!(c.evolution.dtau > 0)) {
            throw ParseError("evolution.dtau must be positive");
        }
        if (c.evolution.order != 2 && c.evolution.order != 4) {
            throw ParseError("evolution.order must be 2 or 4");
        }
        if (!(c.evolution.rel_weight_cutoff >= 0 && c.evolution.rel_weight_cutoff < 1)) {
            throw ParseError("evolution.rel_weight_cutoff must lie in [0, 1)");
        }
    }
    read_opt(j, "alphas", c.alphas, "config");
    read_opt(j, "epsilons", c.epsilons, "config");
    for (double a : c.alphas) {
        if (!(a > 0)) {
            throw ParseError("alphas must be positive");
        }
    }
    for (double e : c.epsilons) {
        if (!(e > 0 && e < 1)) {
            throw ParseError("epsilons must lie in (0, 1)");
        }
    }
    read_opt(j, "bonds", c.bonds, "config");
    for (long b : c.bonds) {
        if (b < 1 || b >= c.model.length) {
            throw ParseError("tracked bond " + std::to_string(b) + " outside 1..L-1");
        }
    }
    read_opt(j, "track_all_bonds", c.track_all_bonds, "config");
    read_opt(j, "output_dir", c.output_dir, "config");
    read_opt(j, "seed", c.seed, "config");
    if (j.contains("budget")) {
        const json& b = j.at("budget");
        check_keys(b, {"max_seconds", "max_bond_dimension"}, "budget");
        read_opt(b, "max_seconds", c.budget.max_seconds, "budget");
        read_opt(b, "max_bond_dimension", c.budget.max_bond_dimension, "budget");
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        check_keys(a, {"central_charge", "scaling_dimension", "fit_min", "fit_max", "saturation_tolerance"},
                   "analysis");
        read_opt(a, "central_charge", c.analysis.central_charge, "analysis");
        read_opt(a, "scaling_dimension", c.analysis.scaling_dimension, "analysis");
        if (a.contains("fit_min") && !a.at("fit_min").is_null()) {
            c.analysis.fit_min = a.at("fit_min").get<double>();
        }
        if (a.contains("fit_max") && !a.at("fit_max").is_null()) {
            c.analysis.fit_max = a.at("fit_max").get<double>();
        }
        read_opt(a, "saturation_tolerance", c.analysis.saturation_tolerance, "analysis");
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json evo = {{"dtau", c.evolution.dtau},
                {"order", c.evolution.order},
                {"max_rank", c.evolution.max_rank},
                {"rel_weight_cutoff", c.evolution.rel_weight_cutoff}};
    const auto& g = c.evolution.grid;
    if (g.is_explicit()) {
        evo["betas"] = g.values;
    } else {
        evo["beta_grid"] = {{"min", g.min},
                            {"max", g.max},
                            {"count", g.count},
                            {"spacing", g.spacing},
                            {"include_zero", g.include_zero}};
    }
    json analysis = {{"central_charge", c.analysis.central_charge},
                     {"scaling_dimension", c.analysis.scaling_dimension},
                     {"saturation_tolerance", c.analysis.saturation_tolerance}};
    analysis["fit_min"] = c.analysis.fit_min ? json(*c.analysis.fit_min) : json(nullptr);
    analysis["fit_max"] = c.analysis.fit_max ? json(*c.analysis.fit_max) : json(nullptr);
    return {{"schema_version", c.schema_version},
            {"name", c.name},
            {"model", model_to_json(c.model)},
            {"evolution", evo},
            {"alphas", c.alphas},
            {"epsilons", c.epsilons},
            {"bonds", c.bonds},
            {"track_all_bonds", c.track_all_bonds},
            {"output_dir", c.output_dir},
            {"seed", c.seed},
            {"budget", {{"max_seconds", c.budget.max_seconds}, {"max_bond_dimension", c.budget.max_bond_dimension}}},
            {"analysis", analysis}};
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config " + path.string());
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const fs::path& path) {
    std::ofstream out(path);
    out << config_to_json(config).dump(2) << '\n';
}

std::vector<double> measurement_grid(const ExperimentConfig& config) {
    const auto& g = config.evolution.grid;
    const double dt = config.evolution.dtau;
    std::vector<double> out;
    if (g.is_explicit()) {
        out = g.values;
    } else {
        for (int k = 0; k < g.count; ++k) {
            const double t = g.count == 1 ? 1.0 : static_cast<double>(k) / (g.count - 1);
            const double b = g.spacing == "log" ? g.min * std::pow(g.max / g.min, t) : g.min + t * (g.max - g.min);
            const double snapped = std::max(1.0, std::round(b / dt)) * dt;
            out.push_back(snapped);
        }
        if (g.include_zero) {
            out.push_back(0.0);
        }
    }
    for (double b : out) {
        if (!(b >= 0)) {
            throw ParameterError("measurement betas must be nonnegative");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              out.end());
    return out;
}

std::vector<long> tracked_bonds(const ExperimentConfig& config) {
    if (config.track_all_bonds) {
        std::vector<long> all;
        for (long b = 1; b < config.model.length; ++b) {
            all.push_back(b);
        }
        return all;
    }
    if (!config.bonds.empty()) {
        std::vector<long> b = config.bonds;
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }
    return {config.model.length / 2};
}

EvolutionConfig evolution_config(const ExperimentConfig& config) {
    EvolutionConfig ec;
    ec.beta_grid = measurement_grid(config);
    ec.start_beta = 0;
    ec.target_beta = ec.beta_grid.empty() ? 0 : ec.beta_grid.back();
    ec.dtau = config.evolution.dtau;
    ec.order = config.evolution.order;
    ec.max_rank = config.evolution.max_rank > 0 ? config.evolution.max_rank : unlimited_rank;
    ec.rel_weight_cutoff = config.evolution.rel_weight_cutoff;
    ec.max_bond_dimension = config.budget.max_bond_dimension;
    ec.max_seconds = config.budget.max_seconds;
    return ec;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string csv_header(const std::vector<double>& alphas) {
    std::string h = "version,model_id,beta,bond,D";
    for (double a : alphas) {
        h += "," + alpha_label(a);
    }
    h += ",eps_step,energy,log_norm,wall_ms";
    return h;
}

std::string format_row(const ResultRow& r) {
    std::string s = fmt::format("{},{},{},{},{}", r.version, r.model_id, num(r.beta), r.bond, r.bond_dimension);
    for (double e : r.entropies) {
        s += "," + num(e);
    }
    s += fmt::format(",{},{},{},{:.3f}", num(r.eps_step), num(r.energy), num(r.log_norm), r.wall_ms);
    return s;
}

ResultTable read_results(std::istream& in) {
    ResultTable table;
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty results file", 1);
    }
    ++lineno;
    const auto head = split_csv(line);
    const std::vector<std::string> lead{"version", "model_id", "beta", "bond", "D"};
    const std::vector<std::string> trail{"eps_step", "energy", "log_norm", "wall_ms"};
    if (head.size() < lead.size() + trail.size() || !std::equal(lead.begin(), lead.end(), head.begin()) ||
        !std::equal(trail.begin(), trail.end(), head.end() - static_cast<long>(trail.size()))) {
        throw ParseError("unexpected results header", lineno);
    }
    for (std::size_t k = lead.size(); k + trail.size() < head.size(); ++k) {
        const std::string& col = head[k];
        if (col.rfind("S_a", 0) != 0) {
            throw ParseError("unexpected column '" + col + "'", lineno);
        }
        table.alphas.push_back(parse_double(col.substr(3), lineno));
    }
    double last_beta = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != head.size()) {
            throw ParseError(fmt::format("expected {} fields, found {}", head.size(), f.size()), lineno);
        }
        ResultRow r;
        r.version = static_cast<int>(parse_long(f[0], lineno));
        if (r.version != csv_schema_version) {
            throw ParseError("unsupported results version " + f[0], lineno);
        }
        r.model_id = f[1];
        r.beta = parse_double(f[2], lineno);
        r.bond = parse_long(f[3], lineno);
        r.bond_dimension = parse_long(f[4], lineno);
        std::size_t k = 5;
        for (std::size_t a = 0; a < table.alphas.size(); ++a) {
            r.entropies.push_back(parse_double(f[k++], lineno));
        }
        r.eps_step = parse_double(f[k++], lineno);
        r.energy = parse_double(f[k++], lineno);
        r.log_norm = parse_double(f[k++], lineno);
        r.wall_ms = parse_double(f[k++], lineno);
        if (r.beta < last_beta) {
            throw ParseError("beta decreases within the file", lineno);
        }
        last_beta = r.beta;
        table.rows.push_back(std::move(r));
    }
    return table;
}

ResultTable read_results(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open results " + path.string());
    }
    return read_results(in);
}

std::string format_spectrum(const SpectrumRecord& r) {
    std::string s = fmt::format("{},{},{},", csv_schema_version, num(r.beta), r.bond);
    for (std::size_t k = 0; k < r.weights.size(); ++k) {
        if (k > 0) {
            s += ' ';
        }
        s += num(r.weights[k]);
    }
    return s;
}

std::vector<SpectrumRecord> read_spectra(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open spectra " + path.string());
    }
    std::vector<SpectrumRecord> out;
    std::string line;
    long lineno = 0;
    std::getline(in, line);
    ++lineno;
    if (line.rfind("version,beta,bond,weights", 0) != 0) {
        throw ParseError("unexpected spectra header", lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (f.size() != 4) {
            throw ParseError("expected 4 fields in spectra row", lineno);
        }
        SpectrumRecord r;
        r.beta = parse_double(f[1], lineno);
        r.bond = parse_long(f[2], lineno);
        std::istringstream ws(f[3]);
        std::string tok;
        while (ws >> tok) {
            r.weights.push_back(parse_double(tok, lineno));
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

constexpr char checkpoint_magic[8] = {'T', 'D', 'S', 'M', 'P', 'S', 'C', 'K'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) {
        throw ParseError("checkpoint truncated");
    }
    return v;
}

void get_doubles(std::istream& in, double* dst, std::int64_t n) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n * static_cast<std::int64_t>(sizeof(double))));
    if (!in) {
        throw ParseError("checkpoint truncated");
    }
}

} // namespace

void write_checkpoint(const Checkpoint& ck, const fs::path& path) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ParseError("cannot write checkpoint " + tmp.string());
        }
        out.write(checkpoint_magic, sizeof checkpoint_magic);
        put(out, checkpoint_format_version);
        json prov = ck.provenance;
        prov["beta"] = ck.beta;
        const std::string text = prov.dump();
        put(out, static_cast<std::uint64_t>(text.size()));
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        const auto& st = ck.state;
        put(out, static_cast<std::int64_t>(st.local_dim()));
        put(out, static_cast<std::int64_t>(st.length()));
        put(out, ck.beta);
        put(out, st.log_norm());
        put(out, static_cast<std::int64_t>(st.center() ? *st.center() : -1));
        for (const auto& t : st.sites()) {
            for (Index k = 0; k < 3; ++k) {
                put(out, static_cast<std::int64_t>(t.dim(k)));
            }
            out.write(reinterpret_cast<const char*>(t.data().data()),
                      static_cast<std::streamsize>(t.size() * static_cast<Index>(sizeof(double))));
        }
        for (const auto& s : st.bond_spectra()) {
            put(out, static_cast<std::int64_t>(s.weights.size()));
            out.write(reinterpret_cast<const char*>(s.weights.data()),
                      static_cast<std::streamsize>(s.weights.size() * sizeof(double)));
        }
        if (!out) {
            throw ParseError("failed writing checkpoint " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

Checkpoint read_checkpoint(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open checkpoint " + path.string());
    }
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, checkpoint_magic, sizeof magic) != 0) {
        throw ParseError("not a checkpoint file: " + path.string());
    }
    const auto version = get<std::uint32_t>(in);
    if (version != checkpoint_format_version) {
        throw ParseError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto len = get<std::uint64_t>(in);
    if (len > (1u << 26)) {
        throw ParseError("checkpoint provenance block too large");
    }
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) {
        throw ParseError("checkpoint truncated");
    }
    Checkpoint ck;
    try {
        ck.provenance = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("checkpoint provenance: ") + e.what());
    }
    const auto d = get<std::int64_t>(in);
    const auto length = get<std::int64_t>(in);
    if (d < 1 || length < 1 || length > (1 << 20)) {
        throw ParseError("corrupt checkpoint header");
    }
    ck.beta = get<double>(in);
    const auto log_norm = get<double>(in);
    const auto center = get<std::int64_t>(in);
    std::vector<DenseTensor<double>> sites;
    for (std::int64_t i = 0; i < length; ++i) {
        std::vector<Index> dims(3);
        std::int64_t total = 1;
        for (auto& x : dims) {
            x = get<std::int64_t>(in);
            if (x < 1 || x > (1 << 24)) {
                throw ParseError("corrupt tensor extent in checkpoint");
            }
            total *= x;
        }
        DenseTensor<double> t(dims);
        get_doubles(in, t.data().data(), total);
        sites.push_back(std::move(t));
    }
    try {
        ck.state = PurificationMps<double>(d, std::move(sites));
    } catch (const std::exception& e) {
        throw ParseError(std::string("inconsistent checkpoint tensors: ") + e.what());
    }
    for (Index b = 1; b < length; ++b) {
        const auto n = get<std::int64_t>(in);
        if (n < 0 || n > (1 << 26)) {
            throw ParseError("corrupt spectrum length in checkpoint");
        }
        BondSpectrum s;
        s.weights.resize(static_cast<std::size_t>(n));
        get_doubles(in, s.weights.data(), n);
        ck.state.set_bond_spectrum(b, std::move(s));
    }
    ck.state.set_log_norm(log_norm);
    if (center >= 0) {
        ck.state.set_center(center);
    }
    return ck;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

json provenance_for(const ExperimentConfig& config) {
    const EvolutionConfig ec = evolution_config(config);
    json cfg = config_to_json(config);
    return {{"model_id", config.model.id()},
            {"plan_hash", plan_hash(build_trotter_plan(ec.order, ec.dtau))},
            {"model", cfg["model"]},
            {"evolution", cfg["evolution"]}};
}

// Keeps the header and rows with beta <= limit.
void trim_file(const fs::path& path, double limit, int beta_column) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("resume: missing " + path.string());
    }
    std::vector<std::string> keep;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            keep.push_back(line);
            header = false;
            continue;
        }
        if (line.empty()) {
            continue;
        }
        const auto f = split_csv(line);
        if (static_cast<int>(f.size()) > beta_column && std::stod(f[static_cast<std::size_t>(beta_column)]) <= limit + 1e-12) {
            keep.push_back(line);
        }
    }
    in.close();
    std::ofstream out(path, std::ios::trunc);
    for (const auto& l : keep) {
        out << l << '\n';
    }
}

void write_status(const fs::path& dir, const RunOutcome& o) {
    json s = {{"completed", o.completed},
              {"beta_reached", o.beta_reached},
              {"results", o.results.string()},
              {"resume_token", o.completed ? json(nullptr) : json(o.checkpoint.string())},
              {"message", o.message}};
    std::ofstream out(dir / "status.json");
    out << s.dump(2) << '\n';
}

} // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const fs::path dir = config.output_dir;
    fs::create_directories(dir);
    save_config(config, dir / "config.json");

    RunOutcome outcome;
    outcome.results = dir / "results.csv";
    outcome.checkpoint = dir / "checkpoint.bin";
    const fs::path spectra_path = dir / "spectra.csv";

    const auto terms = build_bond_terms(config.model);
    const auto bonds = tracked_bonds(config);
    EvolutionConfig ec = evolution_config(config);
    if (options.max_seconds > 0) {
        ec.max_seconds = options.max_seconds;
    }
    const json provenance = provenance_for(config);

    PurificationMps<double> state;
    if (options.resume) {
        Checkpoint ck = read_checkpoint(*options.resume);
        for (const char* key : {"model", "evolution", "plan_hash"}) {
            if (ck.provenance.value(key, json()) != provenance.at(key)) {
                throw ParameterError(std::string("resume token does not match the config (") + key + ")");
            }
        }
        state = std::move(ck.state);
        ec.start_beta = ck.beta;
        ec.observe_start = false;
        trim_file(outcome.results, ck.beta, 2);
        trim_file(spectra_path, ck.beta, 1);
        outcome.beta_reached = ck.beta;
    } else {
        state = build_infinite_temperature_tds<double>(config.model.local_dim(), config.model.length);
        std::ofstream(outcome.results, std::ios::trunc) << csv_header(config.alphas) << '\n';
        std::ofstream(spectra_path, std::ios::trunc) << "version,beta,bond,weights\n";
        write_checkpoint({state, 0.0, provenance}, outcome.checkpoint);
    }

    std::ofstream results(outcome.results, std::ios::app);
    std::ofstream spectra(spectra_path, std::ios::app);
    const auto started = std::chrono::steady_clock::now();
    const std::string model_id = config.model.id();

    auto observer = [&](const Snapshot<double>& snap) {
        const double wall =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
        for (long b : bonds) {
            const auto& spec = snap.spectra[static_cast<std::size_t>(b - 1)];
            ResultRow row;
            row.model_id = model_id;
            row.beta = snap.beta;
            row.bond = b;
            row.bond_dimension = snap.bond_dimensions[static_cast<std::size_t>(b - 1)];
            for (double a : config.alphas) {
                row.entropies.push_back(renyi_entropy(spec, a));
            }
            row.eps_step = snap.bond_errors[static_cast<std::size_t>(b - 1)];
            row.energy = snap.energy;
            row.log_norm = snap.state->log_norm();
            row.wall_ms = wall;
            results << format_row(row) << '\n';
            spectra << format_spectrum({snap.beta, b, spec.weights}) << '\n';
        }
        results.flush();
        spectra.flush();
        write_checkpoint({*snap.state, snap.beta, provenance}, outcome.checkpoint);
        outcome.beta_reached = snap.beta;
        if (options.log) {
            *options.log << fmt::format("beta={:g} D_max={} wall={:.1f}s\n", snap.beta, snap.state->max_bond_dimension(),
                                        wall / 1000.0);
        }
    };

    try {
        evolve(std::move(state), terms, ec, observer);
        outcome.completed = true;
        outcome.message = "completed";
    } catch (const ResourceError& e) {
        outcome.completed = false;
        outcome.message = std::string("stopped: ") + e.what();
    }
    write_status(dir, outcome);
    return outcome;
}

// ---------------------------------------------------------------------------
// analyze / report
// ---------------------------------------------------------------------------

namespace {

json fit_json(const ScalingFit& f) {
    return {{"slope", f.slope},
            {"intercept", f.intercept},
            {"residual_rms", f.residual_rms},
            {"points", f.point_count},
            {"window", {f.window.x_min, f.window.x_max}}};
}

struct Window {
    double lo = 0;
    double hi = 0;
};

Window beta_window(const ExperimentConfig& config, const std::vector<double>& betas) {
    std::vector<double> pos;
    for (double b : betas) {
        if (b > 0) {
            pos.push_back(b);
        }
    }
    if (pos.empty()) {
        return {0, 0};
    }
    const double lo = pos.front();
    const double hi = pos.back();
    // Upper half of the range in log(beta).
    Window w{std::exp(0.5 * (std::log(lo) + std::log(hi))), hi};
    if (config.analysis.fit_min) {
        w.lo = *config.analysis.fit_min;
    }
    if (config.analysis.fit_max) {
        w.hi = *config.analysis.fit_max;
    }
    return w;
}

FitWindow log_window(const Window& w) {
    return {std::log(w.lo) - 1e-12, std::log(w.hi) + 1e-12};
}

long center_bond(const ExperimentConfig& config) { return config.model.length / 2; }

} // namespace

json analyze_results(const ExperimentConfig& config, const ResultTable& table,
                     const std::vector<SpectrumRecord>& spectra) {
    const long bond = center_bond(config);
    const double c = config.analysis.central_charge;
    std::vector<const ResultRow*> rows;
    for (const auto& r : table.rows) {
        if (r.bond == bond) {
            rows.push_back(&r);
        }
    }
    std::vector<double> betas;
    for (const auto* r : rows) {
        betas.push_back(r->beta);
    }
    const Window w = beta_window(config, betas);

    json report;
    report["schema_version"] = config_schema_version;
    report["model_id"] = config.model.id();
    report["length"] = config.model.length;
    report["bond"] = bond;
    report["fit_window_beta"] = {w.lo, w.hi};

    json entropy = json::array();
    for (std::size_t a = 0; a < table.alphas.size(); ++a) {
        const double alpha = table.alphas[a];
        Series s;
        s.metadata = {{"model", config.model.id()}, {"alpha", fmt::format("{:g}", alpha)}, {"bond", std::to_string(bond)}};
        Series raw;
        bool monotone = true;
        double prev = -1;
        for (const auto* r : rows) {
            if (r->beta > 0) {
                s.push_back(std::log(r->beta), r->entropies[a]);
                raw.push_back(r->beta, r->entropies[a]);
            }
            if (prev > r->entropies[a] + 1e-6) {
                monotone = false;
            }
            prev = r->entropies[a];
        }
        json item = {{"alpha", alpha},
                     {"predicted_slope", theory::entropy_log_slope(c, alpha)},
                     {"monotone", monotone}};
        try {
            item["fit"] = fit_json(fit_line(s, log_window(w)));
        } catch (const DataError& e) {
            item["fit"] = nullptr;
            item["fit_error"] = e.what();
        }
        if (raw.size() >= 7) {
            const auto sat = detect_saturation(raw, config.analysis.saturation_tolerance);
            item["saturation"] = {{"saturated", sat.saturated},
                                  {"plateau", sat.plateau},
                                  {"tolerance", config.analysis.saturation_tolerance}};
        } else {
            item["saturation"] = nullptr;
        }
        entropy.push_back(item);
    }
    report["entropy"] = entropy;

    std::vector<std::pair<double, BondSpectrum>> per_beta;
    for (const auto& rec : spectra) {
        if (rec.bond == bond && rec.beta > 0) {
            per_beta.emplace_back(rec.beta, BondSpectrum{rec.weights, rec.bond});
        }
    }
    json deps = json::array();
    for (double eps : config.epsilons) {
        json item = {{"epsilon", eps},
                     {"valid", config.evolution.rel_weight_cutoff <= eps / 100.0},
                     {"cutoff", config.evolution.rel_weight_cutoff}};
        if (per_beta.empty()) {
            item["series"] = json::array();
            deps.push_back(item);
            continue;
        }
        const Series d = extract_D_epsilon(per_beta, eps);
        json pts = json::array();
        for (const auto& p : d.points) {
            pts.push_back({p.x, p.y});
        }
        item["series"] = pts;
        try {
            const ScalingFit f = fit_line(log_log(d), log_window(w));
            item["fit"] = fit_json(f);
            item["lambda"] = f.slope;
        } catch (const DataError& e) {
            item["fit"] = nullptr;
            item["fit_error"] = e.what();
        }
        const double y = w.hi;
        item["y"] = y;
        try {
            const double astar = theory::optimal_alpha(c, eps, y);
            const double lstar = theory::d_scaling_exponent(c, astar);
            item["alpha_star"] = astar;
            item["lambda_star"] = lstar;
            item["lambda_star_exceeds_c_over_3"] = lstar > c / 3.0;
            if (item.contains("lambda")) {
                item["lambda_below_lambda_star"] = item["lambda"].get<double>() < lstar;
            }
        } catch (const DomainError& e) {
            item["alpha_star"] = nullptr;
            item["lambda_star"] = nullptr;
            item["theory_error"] = e.what();
        }
        deps.push_back(item);
    }
    report["d_epsilon"] = deps;

    const double beta_max = betas.empty() ? 0 : betas.back();
    json fsize = {{"length", config.model.length}, {"beta_max", beta_max}};
    if (beta_max > 0 && config.analysis.scaling_dimension > 0) {
        const double xi = theory::thermal_correlation_length(config.analysis.scaling_dimension, beta_max);
        const double ratio = static_cast<double>(config.model.length) / xi;
        fsize["xi_beta"] = xi;
        fsize["length_over_xi"] = ratio;
        fsize["ok"] = ratio >= 5.0;
    }
    report["finite_size"] = fsize;
    return report;
}

json analyze_directory(const fs::path& dir) {
    const ExperimentConfig config = load_config(dir / "config.json");
    const ResultTable table = read_results(dir / "results.csv");
    std::vector<SpectrumRecord> spectra;
    if (fs::exists(dir / "spectra.csv")) {
        spectra = read_spectra(dir / "spectra.csv");
    }
    return analyze_results(config, table, spectra);
}

std::string report_table(const ExperimentConfig& config, const ResultTable& table,
                         const std::vector<SpectrumRecord>& spectra) {
    const long bond = center_bond(config);
    const double c = config.analysis.central_charge;
    std::vector<const ResultRow*> rows;
    for (const auto& r : table.rows) {
        if (r.bond == bond && r.beta > 0) {
            rows.push_back(&r);
        }
    }
    // Anchor each CFT line at the mean offset over the measured points.
    std::vector<double> offsets;
    for (std::size_t a = 0; a < table.alphas.size(); ++a) {
        const double slope = theory::entropy_log_slope(c, table.alphas[a]);
        double sum = 0;
        for (const auto* r : rows) {
            sum += r->entropies[a] - slope * std::log(r->beta / std::numbers::pi);
        }
        offsets.push_back(rows.empty() ? 0.0 : sum / static_cast<double>(rows.size()));
    }
    std::string out = "beta,log_beta,D";
    for (double a : table.alphas) {
        out += fmt::format(",S_a{:g},cft_a{:g}", a, a);
    }
    for (double e : config.epsilons) {
        out += fmt::format(",D_eps{:g}", e);
    }
    out += '\n';
    for (const auto* r : rows) {
        out += fmt::format("{},{},{}", num(r->beta), num(std::log(r->beta)), r->bond_dimension);
        for (std::size_t a = 0; a < table.alphas.size(); ++a) {
            const double pred = theory::cft_entropy_prediction(c, table.alphas[a], r->beta, offsets[a]);
            out += fmt::format(",{},{}", num(r->entropies[a]), num(pred));
        }
        const SpectrumRecord* rec = nullptr;
        for (const auto& s : spectra) {
            if (s.bond == bond && std::abs(s.beta - r->beta) < 1e-12) {
                rec = &s;
            }
        }
        for (double e : config.epsilons) {
            if (rec) {
                out += fmt::format(",{}", d_epsilon(BondSpectrum{rec->weights, bond}, e));
            } else {
                out += ",";
            }
        }
        out += '\n';
    }
    return out;
}

} // namespace tdsmps
