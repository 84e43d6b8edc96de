// SPDX-License-Identifier: Apache-2.0

#include "isac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "isac/log.hpp"
#include "isac/rng.hpp"

namespace isac {

namespace {
constexpr double pi = 3.14159265358979323846;

struct RawEntry {
    std::string value;
    int line = 0;
};

struct RawConfig {
    std::string source;
    std::map<std::string, RawEntry> entries;
    mutable std::set<std::string> consumed;

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        const auto it = entries.find(key);
        throw ConfigError(source, it == entries.end() ? 0 : it->second.line,
                          "key '" + key + "': " + msg);
    }

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    const std::string* raw(const std::string& key) const {
        const auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        consumed.insert(key);
        return &it->second.value;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const std::string* v = raw(key);
        return v == nullptr ? fallback : *v;
    }

    double parse_double(const std::string& key, const std::string& token) const {
        if (token == "inf" || token == "+inf") return std::numeric_limits<double>::infinity();
        try {
            std::size_t used = 0;
            const double v = std::stod(token, &used);
            if (used != token.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            fail(key, "expected a number, got '" + token + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        const std::string* v = raw(key);
        return v == nullptr ? fallback : parse_double(key, *v);
    }

    long get_long(const std::string& key, long fallback) const {
        const std::string* v = raw(key);
        if (v == nullptr) return fallback;
        try {
            std::size_t used = 0;
            const long out = std::stol(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing characters");
            return out;
        } catch (const std::exception&) {
            fail(key, "expected an integer, got '" + *v + "'");
        }
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        const std::string* v = raw(key);
        if (v == nullptr) return fallback;
        try {
            std::size_t used = 0;
            const std::uint64_t out = std::stoull(*v, &used);
            if (used != v->size()) throw std::invalid_argument("trailing characters");
            return out;
        } catch (const std::exception&) {
            fail(key, "expected an unsigned integer, got '" + *v + "'");
        }
    }

    std::vector<std::string> split_array(const std::string& key, const std::string& text) const {
        std::string body = text;
        if (body.size() < 2 || body.front() != '[' || body.back() != ']')
            fail(key, "expected an array like [a, b, c]");
        body = body.substr(1, body.size() - 2);
        std::vector<std::string> out;
        std::string token;
        int depth = 0;
        for (char ch : body) {
            if (ch == '(') ++depth;
            if (ch == ')') --depth;
            if (ch == ',' && depth == 0) {
                out.push_back(token);
                token.clear();
            } else {
                token.push_back(ch);
            }
        }
        if (!token.empty() ||
            !body.empty()) { // final token (possibly empty for trailing comma)
            out.push_back(token);
        }
        // trim tokens, drop empties from trailing commas / empty arrays
        std::vector<std::string> trimmed;
        for (std::string& t : out) {
            const auto b = t.find_first_not_of(" \t");
            if (b == std::string::npos) continue;
            const auto e = t.find_last_not_of(" \t");
            trimmed.push_back(t.substr(b, e - b + 1));
        }
        return trimmed;
    }

    std::vector<double> get_double_array(const std::string& key,
                                         const std::vector<double>& fallback) const {
        const std::string* v = raw(key);
        if (v == nullptr) return fallback;
        std::vector<double> out;
        for (const std::string& tok : split_array(key, *v)) out.push_back(parse_double(key, tok));
        return out;
    }

    std::vector<int> get_int_array(const std::string& key) const {
        const std::string* v = raw(key);
        if (v == nullptr) return {};
        std::vector<int> out;
        for (const std::string& tok : split_array(key, *v)) {
            const double d = parse_double(key, tok);
            if (d != std::floor(d)) fail(key, "expected integers");
            out.push_back(static_cast<int>(d));
        }
        return out;
    }

    Eigen::VectorXcd get_complex_array(const std::string& key) const {
        const std::string* v = raw(key);
        if (v == nullptr) return {};
        const auto tokens = split_array(key, *v);
        Eigen::VectorXcd out(static_cast<Eigen::Index>(tokens.size()));
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const std::string& t = tokens[i];
            if (t.size() < 2 || t.front() != '(' || t.back() != ')')
                fail(key, "expected complex entries like (re,im)");
            const std::string body = t.substr(1, t.size() - 2);
            const auto comma = body.find(',');
            if (comma == std::string::npos) fail(key, "expected complex entries like (re,im)");
            out(static_cast<Eigen::Index>(i)) = {parse_double(key, body.substr(0, comma)),
                                                 parse_double(key, body.substr(comma + 1))};
        }
        return out;
    }
};

RawConfig tokenize(const std::string& text, const std::string& source) {
    RawConfig raw;
    raw.source = source;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source, lineno, "expected 'key = value'");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kb = key.find_last_not_of(" \t");
        if (kb == std::string::npos) throw ConfigError(source, lineno, "empty key");
        key = key.substr(0, kb + 1);
        const auto vb = value.find_first_not_of(" \t");
        if (vb == std::string::npos) throw ConfigError(source, lineno, "empty value");
        value = value.substr(vb);
        if (raw.entries.count(key) != 0)
            throw ConfigError(source, lineno, "duplicate key '" + key + "'");
        raw.entries[key] = {value, lineno};
    }
    return raw;
}

double to_radians(double angle, bool degrees) { return degrees ? angle * pi / 180.0 : angle; }

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
    const RawConfig raw = tokenize(text, source_name);

    const std::string schema = raw.get_string("schema", "");
    if (schema != "isac-config-v1")
        throw ConfigError(source_name, raw.has("schema") ? raw.entries.at("schema").line : 0,
                          "missing or unsupported schema (expected isac-config-v1)");

    ExperimentConfig cfg;
    Scenario& sc = cfg.scenario;

    sc.geometry.num_tx = static_cast<int>(raw.get_long("scenario.num_tx", 4));
    sc.geometry.num_rx = static_cast<int>(raw.get_long("scenario.num_rx", 4));
    sc.geometry.num_slots = static_cast<int>(raw.get_long("scenario.num_slots", 16));

    const std::string unit = raw.get_string("scenario.angle_unit", "radians");
    bool degrees = false;
    if (unit == "degrees" || unit == "deg") {
        degrees = true;
    } else if (unit != "radians" && unit != "rad") {
        raw.fail("scenario.angle_unit", "expected degrees|radians");
    }

    sc.target.kind = ScattererKind::Target;
    sc.target.angle = to_radians(raw.get_double("scenario.target.angle", 0.0), degrees);
    sc.target.delay = static_cast<int>(raw.get_long("scenario.target.delay", 0));
    sc.target.power_dbm = raw.get_double("scenario.target.power_dbm", 15.0);

    const std::vector<double> cl_angles = raw.get_double_array("scenario.clutter.angles", {});
    const std::vector<int> cl_delays = raw.get_int_array("scenario.clutter.delays");
    const std::vector<double> cl_powers = raw.get_double_array("scenario.clutter.powers_dbm", {});
    if (cl_delays.size() != cl_angles.size() || cl_powers.size() != cl_angles.size())
        raw.fail("scenario.clutter.angles", "clutter angles/delays/powers_dbm lengths differ");
    for (std::size_t k = 0; k < cl_angles.size(); ++k) {
        Scatterer c;
        c.kind = ScattererKind::Clutter;
        c.angle = to_radians(cl_angles[k], degrees);
        c.delay = cl_delays[k];
        c.power_dbm = cl_powers[k];
        sc.clutter.push_back(c);
    }

    const std::string dmode = raw.get_string("scenario.clutter.doppler_mode", "static");
    if (dmode == "static") {
        sc.clutter_doppler.mode = ClutterDopplerMode::Static;
    } else if (dmode == "affine") {
        sc.clutter_doppler.mode = ClutterDopplerMode::Affine;
    } else {
        raw.fail("scenario.clutter.doppler_mode", "expected static|affine");
    }
    sc.clutter_doppler.rho = raw.get_double_array("scenario.clutter.doppler_rho",
                                                  std::vector<double>(sc.clutter.size(), 0.0));
    sc.clutter_doppler.offset = raw.get_double_array("scenario.clutter.doppler_c",
                                                     std::vector<double>(sc.clutter.size(), 0.0));

    sc.doppler.values = raw.get_double_array("scenario.doppler_grid", {0.0});
    sc.noise.radar_noise_dbm = raw.get_double("scenario.radar_noise_dbm", -90.0);
    sc.noise.warden_noise_dbm = raw.get_double("scenario.warden_noise_dbm", -90.0);

    DesignParams& dp = cfg.params;
    dp.papr_cap = raw.get_double("design.papr_cap", 2.0);
    dp.amp_floor = raw.get_double("design.amp_floor", 0.5);
    dp.phase_tol = raw.get_double("design.phase_tol", pi / 6.0);
    dp.covert_eps = raw.get_double("design.covert_eps", 0.1);
    dp.penalty = raw.get_double("design.penalty", 10.0);
    dp.stop_tol_db = raw.get_double("design.stop_tol_db", 1e-3);
    dp.max_outer = static_cast<int>(raw.get_long("design.max_outer", 100));
    dp.feas_tol = raw.get_double("design.feas_tol", 1e-8);
    dp.gap_tol = raw.get_double("design.gap_tol", 1e-8);
    dp.max_inner = static_cast<int>(raw.get_long("design.max_inner", 200));
    const std::string pmode = raw.get_string("design.phase_mode", "wedge");
    if (pmode == "wedge") {
        dp.phase_mode = PhaseMode::Wedge;
    } else if (pmode == "half-plane") {
        dp.phase_mode = PhaseMode::HalfPlane;
    } else {
        raw.fail("design.phase_mode", "expected wedge|half-plane");
    }

    const std::string ssource = raw.get_string("symbols.source", "random");
    if (ssource == "random") {
        cfg.symbols_random = true;
    } else if (ssource == "bits") {
        cfg.symbols_random = false;
        for (int b : raw.get_int_array("symbols.bits")) {
            if (b != 0 && b != 1) raw.fail("symbols.bits", "bits must be 0 or 1");
            cfg.symbol_bits.push_back(static_cast<std::uint8_t>(b));
        }
        if (cfg.symbol_bits.size() !=
            2 * static_cast<std::size_t>(sc.geometry.tx_len()))
            raw.fail("symbols.bits", "need exactly 2 bits per waveform element");
    } else {
        raw.fail("symbols.source", "expected random|bits");
    }

    const std::string wsource = raw.get_string("warden.source", "rayleigh");
    if (wsource == "rayleigh") {
        cfg.warden_random = true;
        cfg.warden_gain_db = raw.get_double("warden.gain_db", -125.0);
    } else if (wsource == "explicit") {
        cfg.warden_random = false;
        cfg.warden_h = raw.get_complex_array("warden.h");
        if (cfg.warden_h.size() != sc.geometry.num_tx)
            raw.fail("warden.h", "need one (re,im) entry per transmit antenna");
    } else {
        raw.fail("warden.source", "expected rayleigh|explicit");
    }

    cfg.sweep_xi = raw.get_double_array("sweep.xi", {dp.phase_tol});
    cfg.sweep_eps = raw.get_double_array("sweep.eps", {dp.covert_eps});
    cfg.ser_snr_db = raw.get_double_array("ser.snr_db", {0.0, 5.0, 10.0, 15.0, 20.0});
    cfg.ser_trials = static_cast<int>(raw.get_long("ser.trials", 100000));
    cfg.echo_draws = static_cast<int>(raw.get_long("mc.echo_draws", 100000));
    cfg.kl_samples = static_cast<int>(raw.get_long("mc.kl_samples", 20000));
    cfg.lrt_trials = static_cast<int>(raw.get_long("mc.lrt_trials", 20000));

    const bool stochastic = cfg.symbols_random || cfg.warden_random;
    if (stochastic && !raw.has("seed"))
        throw ConfigError(source_name, 0,
                          "a seed is required when symbols or the warden channel are random");
    cfg.seed = raw.get_u64("seed", 1);

    // Config-level invariants, anchored to the offending key.
    if (!(dp.amp_floor >= 0.0 && dp.amp_floor <= 1.0))
        raw.fail("design.amp_floor", "amplitude floor must satisfy gamma_low^2 <= 1");
    if (!(dp.papr_cap >= 1.0))
        raw.fail("design.papr_cap", "PAPR cap must satisfy gamma_up >= 1");
    if (!(dp.phase_tol > 0.0 && dp.phase_tol < pi / 2.0))
        raw.fail("design.phase_tol", "phase tolerance must lie in (0, pi/2)");
    if (cfg.sweep_xi.empty()) raw.fail("sweep.xi", "sweep axis must be nonempty");
    if (cfg.sweep_eps.empty()) raw.fail("sweep.eps", "sweep axis must be nonempty");
    if (cfg.ser_snr_db.empty()) raw.fail("ser.snr_db", "SNR grid must be nonempty");
    for (std::size_t i = 1; i < cfg.sweep_xi.size(); ++i)
        if (!(cfg.sweep_xi[i - 1] < cfg.sweep_xi[i]))
            raw.fail("sweep.xi", "sweep axis must be strictly increasing");
    for (std::size_t i = 1; i < cfg.sweep_eps.size(); ++i)
        if (!(cfg.sweep_eps[i - 1] < cfg.sweep_eps[i]))
            raw.fail("sweep.eps", "sweep axis must be strictly increasing");

    try {
        dp.validate();
        sc.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(source_name, 0, err.what());
    }

    for (const auto& [key, entry] : raw.entries)
        if (raw.consumed.count(key) == 0 && key != "schema")
            log_warn(source_name + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                     "' ignored");

    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), 0, "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

void apply_desk_scale(ExperimentConfig& config) {
    config.scenario.geometry.num_tx = 4;
    config.scenario.geometry.num_rx = 4;
    config.scenario.geometry.num_slots = 16;
    if (!config.symbols_random)
        config.symbol_bits.resize(2 * static_cast<std::size_t>(config.scenario.geometry.tx_len()),
                                  0);
    if (!config.warden_random && config.warden_h.size() != 4)
        throw std::invalid_argument("desk-scale override needs a 4-antenna warden channel");
    config.scenario.validate();
}

SymbolFrame ExperimentConfig::make_symbols(std::uint64_t chosen_seed) const {
    const int len = scenario.geometry.tx_len();
    if (symbols_random) return SymbolFrame::random(len, chosen_seed);
    std::vector<std::uint8_t> pairs(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i)
        pairs[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
            (symbol_bits[2 * static_cast<std::size_t>(i)] << 1) |
            symbol_bits[2 * static_cast<std::size_t>(i) + 1]);
    return SymbolFrame::from_bits(pairs);
}

WardenChannel ExperimentConfig::make_warden(std::uint64_t chosen_seed) const {
    WardenChannel ch;
    ch.noise_power = scenario.warden_noise_linear();
    if (!warden_random) {
        ch.h = warden_h;
        return ch;
    }
    const double gain = dbm_to_linear(warden_gain_db); // dB and dBm share the 10^(x/10) map
    StreamRng rng(chosen_seed, rng_stream::warden);
    ch.h.resize(scenario.geometry.num_tx);
    for (int i = 0; i < scenario.geometry.num_tx; ++i) ch.h(i) = rng.cgaussian(gain);
    return ch;
}

}  // namespace isac
