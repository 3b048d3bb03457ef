#include "flock/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "flock/error.hpp"
#include "flock/rng.hpp"

namespace flock {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {"k",       "alpha",         "lambda",           "h",
                                          "horizon", "seed",          "epsilon",          "record_stride",
                                          "initial", "tail_lag",      "stop_on_flocking"};

template <class T>
T field(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}

std::uint64_t count_field(const json& doc, const char* key, std::uint64_t fallback) {
    if (!doc.contains(key)) return fallback;
    const json& v = doc.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) throw ConfigError(key, "must be nonnegative");
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(key, "must be a nonnegative integer");
}

std::vector<Vec3> parse_vectors(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_array()) throw ConfigError(std::string("initial.") + key, "missing array");
    std::vector<Vec3> out;
    for (const auto& item : doc.at(key)) {
        if (!item.is_array() || item.size() != 3)
            throw ConfigError(std::string("initial.") + key, "each entry must be a 3-vector");
        Vec3 v;
        for (int c = 0; c < 3; ++c) {
            if (!item[c].is_number()) throw ConfigError(std::string("initial.") + key, "non-numeric coordinate");
            v[c] = item[c].get<double>();
        }
        out.push_back(v);
    }
    return out;
}

json vectors_to_json(const std::vector<Vec3>& vs) {
    json a = json::array();
    for (const auto& v : vs) a.push_back({v[0], v[1], v[2]});
    return a;
}

ExperimentConfig parse_scalar_fields(const json& doc) {
    if (!doc.is_object()) throw ConfigError("", "config document must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!kKnownKeys.count(key)) throw ConfigError(key, "unknown key");
    for (const char* key : {"k", "alpha", "lambda"})
        if (!doc.contains(key)) throw ConfigError(key, "required key missing");

    ExperimentConfig c;
    c.h = field<double>(doc, "h", 0.0);
    if (doc.contains("h") && !(c.h > 0.0)) throw ConfigError("h", "time step must be positive");
    c.horizon = count_field(doc, "horizon", c.horizon);
    c.master_seed = count_field(doc, "seed", 0);
    c.epsilon = field<double>(doc, "epsilon", c.epsilon);
    c.record_stride = count_field(doc, "record_stride", c.record_stride);
    c.tail_lag = count_field(doc, "tail_lag", c.tail_lag);
    c.stop_on_flocking = field<bool>(doc, "stop_on_flocking", c.stop_on_flocking);

    if (doc.contains("initial")) {
        const json& ic = doc.at("initial");
        if (ic.is_string()) {
            if (ic.get<std::string>() != "normal") throw ConfigError("initial", "expected \"normal\" or an object");
        } else if (ic.is_object()) {
            for (const auto& [key, value] : ic.items())
                if (key != "positions" && key != "velocities") throw ConfigError("initial." + key, "unknown key");
            FlockState s;
            s.positions = parse_vectors(ic, "positions");
            s.velocities = parse_vectors(ic, "velocities");
            c.initial = std::move(s);
        } else {
            throw ConfigError("initial", "expected \"normal\" or an object");
        }
    }
    return c;
}

template <class T>
std::vector<T> axis(const json& doc, const char* key, bool allow_list) {
    const json& v = doc.at(key);
    std::vector<T> out;
    try {
        if (v.is_array()) {
            if (!allow_list) throw ConfigError(key, "lists are only accepted by sweeps");
            if (v.empty()) throw ConfigError(key, "empty list");
            for (const auto& x : v) out.push_back(x.get<T>());
        } else {
            out.push_back(v.get<T>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
    return out;
}

std::vector<ExperimentConfig> expand(const json& doc, bool allow_list) {
    const ExperimentConfig base = parse_scalar_fields(doc);
    std::vector<ExperimentConfig> cells;
    for (const json& kv : doc.at("k").is_array() ? doc.at("k") : json::array({doc.at("k")})) {
        if (!kv.is_number_integer() || kv.get<long long>() < 2) throw ConfigError("k", "must be an integer >= 2");
    }
    for (auto k : axis<std::size_t>(doc, "k", allow_list))
        for (double alpha : axis<double>(doc, "alpha", allow_list))
            for (double lambda : axis<double>(doc, "lambda", allow_list)) {
                ExperimentConfig c = base;
                c.k = k;
                c.alpha = alpha;
                c.lambda = lambda;
                cells.push_back(validated(c));
            }
    return cells;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string opt(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, ',')) cells.push_back(cur);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double to_double(const std::string& s, const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const double d = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return d;
    } catch (const std::exception&) {
        throw IoError(path.string() + ": bad number '" + s + "'");
    }
}

void write_metadata(const std::filesystem::path& data_path, json meta) {
    meta["artifact"] = "flock";
    meta["version"] = kVersion;
    meta["rng"] = kRngAlgorithm;
    meta["data_file"] = data_path.filename().string();
    std::filesystem::path meta_path = data_path;
    meta_path += ".meta.json";
    auto out = open_out(meta_path);
    out << meta.dump(2) << '\n';
    finish(out, meta_path);
}

}  // namespace

void apply_overrides(json& doc, const std::vector<std::string>& overrides) {
    if (!doc.is_object()) throw ConfigError("", "config document must be a JSON object");
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError(item, "override must look like key=value");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        json parsed = json::parse(value, nullptr, false);
        doc[key] = parsed.is_discarded() ? json(value) : parsed;
    }
}

ExperimentConfig parse_config(const json& doc) { return expand(doc, false).front(); }

ExperimentConfig parse_config_text(std::string_view text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ConfigError("", "config is not valid JSON");
    return parse_config(doc);
}

std::vector<ExperimentConfig> parse_grid(const json& doc) { return expand(doc, true); }

json load_document(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) throw ConfigError("", path.string() + " is not valid JSON");
    return doc;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["k"] = c.k;
    j["alpha"] = c.alpha;
    j["lambda"] = c.lambda;
    j["h"] = c.h;
    j["horizon"] = c.horizon;
    j["seed"] = c.master_seed;
    j["epsilon"] = c.epsilon;
    j["record_stride"] = c.record_stride;
    j["stop_on_flocking"] = c.stop_on_flocking;
    j["tail_lag"] = c.tail_lag;
    if (c.initial)
        j["initial"] = {{"positions", vectors_to_json(c.initial->positions)},
                        {"velocities", vectors_to_json(c.initial->velocities)}};
    else
        j["initial"] = "normal";
    return j;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory(const TrajectoryRecord& record, const ExperimentConfig& config,
                      const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kTrajectoryHeader << '\n';
    for (const auto& r : record.rows) {
        out << r.t << ',' << format_double(r.v_norm) << ',' << opt(r.log_v_norm) << ','
            << format_double(r.fiedler_colored) << ',' << format_double(r.fiedler_plain) << ','
            << (r.connected ? 1 : 0) << ',' << opt(r.mu) << ',' << format_double(r.s_partial) << '\n';
    }
    finish(out, path);

    json meta;
    meta["kind"] = "trajectory";
    meta["config"] = config_to_json(config);
    meta["seed"] = config.master_seed;
    meta["columns"] = split_csv(kTrajectoryHeader);
    meta["rows"] = record.rows.size();
    if (const auto flocked = detect_flocking(record, config.epsilon)) meta["flocking_step"] = *flocked;
    else meta["flocking_step"] = nullptr;
    if (record.tail_position_increment) meta["tail_position_increment"] = *record.tail_position_increment;
    write_metadata(path, std::move(meta));
}

TrajectoryRecord read_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) throw IoError(path.string() + ": unexpected header");
    TrajectoryRecord record;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 8) throw IoError(path.string() + ": expected 8 columns in '" + line + "'");
        TrajectoryRow r;
        r.t = std::stoull(c[0]);
        r.v_norm = to_double(c[1], path);
        if (!c[2].empty()) r.log_v_norm = to_double(c[2], path);
        r.fiedler_colored = to_double(c[3], path);
        r.fiedler_plain = to_double(c[4], path);
        r.connected = c[5] == "1";
        if (!c[6].empty()) r.mu = to_double(c[6], path);
        r.s_partial = to_double(c[7], path);
        record.rows.push_back(r);
    }
    return record;
}

void write_sweep(const SweepSummary& summary, const std::vector<ExperimentConfig>& grid, std::uint64_t n_runs,
                 const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kSweepHeader << '\n';
    for (const auto& c : summary.cells) {
        out << c.cell << ',' << c.k << ',' << format_double(c.alpha) << ',' << format_double(c.lambda) << ','
            << format_double(c.h) << ',' << c.n_runs << ',' << c.n_flocked << ',' << format_double(c.flocking_fraction)
            << ',' << opt(c.median_flocking_time) << ',' << c.n_slopes << ',' << opt(c.mean_slope) << ','
            << opt(c.slope_std) << '\n';
    }
    finish(out, path);

    json meta;
    meta["kind"] = "sweep";
    meta["runs_per_cell"] = n_runs;
    meta["cells"] = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        json cell = config_to_json(grid[i]);
        cell["cell"] = i;
        meta["cells"].push_back(cell);
    }
    meta["run_seed_derivation"] = "run_seed = derive(seed ^ 0x5357454550, cell, run)";
    write_metadata(path, std::move(meta));
}

void write_critical_velocity(const std::vector<CriticalVelocityRow>& rows, std::uint64_t seed,
                             const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "k,lambda,n_samples,estimate,std_error,exact\n";
    for (const auto& r : rows)
        out << r.k << ',' << format_double(r.lambda) << ',' << r.n_samples << ',' << format_double(r.estimate.value)
            << ',' << format_double(r.estimate.std_error) << ',' << opt(r.exact) << '\n';
    finish(out, path);

    json meta;
    meta["kind"] = "critical-velocity";
    meta["seed"] = seed;
    write_metadata(path, std::move(meta));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    finish(out, path);
}

}  // namespace flock
