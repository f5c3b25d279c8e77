#include "bpvec/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "bpvec/rng.hpp"
#include "json.hpp"

namespace bpvec {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("scenario: " + msg); }

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) fail("malformed number '" + tok + "' in " + where);
        return v;
    } catch (const std::invalid_argument&) {
        fail("malformed number '" + tok + "' in " + where);
    } catch (const std::out_of_range&) {
        fail("number out of range '" + tok + "' in " + where);
    }
}

long long parse_int(const std::string& tok, const std::string& where) {
    try {
        size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) fail("malformed integer '" + tok + "' in " + where);
        return v;
    } catch (const std::exception&) {
        fail("malformed integer '" + tok + "' in " + where);
    }
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

struct RawEntity {
    std::string kind;
    std::vector<std::string> fields;
    std::string where;
};

// Field draws are keyed on (kind, id, field) so inserting or reordering
// entity lines never perturbs another entity's sampled values.
double sample_field(uint64_t seed, int kind, int id, int field, double lo, double hi) {
    SplitMix64 g(mix_seed(seed, static_cast<uint64_t>(kind) * 1000003ULL +
                                    static_cast<uint64_t>(id) * 131ULL +
                                    static_cast<uint64_t>(field)));
    return g.uniform(lo, hi);
}

int sample_hour(uint64_t seed, int id) {
    SplitMix64 g(mix_seed(seed, 7000003ULL + static_cast<uint64_t>(id)));
    return static_cast<int>(g.below(24));
}

}  // namespace

double ConsensusCostParams::tx_per_block() const {
    return std::llround(block_bits / tx_bits) > 0 ? static_cast<double>(std::llround(block_bits / tx_bits))
                                                  : 0.0;
}

double ConsensusCostParams::rsu_tx_per_block() const {
    return std::llround(rsu_block_bits / tx_bits) > 0
               ? static_cast<double>(std::llround(rsu_block_bits / tx_bits))
               : 0.0;
}

std::vector<ParkedVehicle> generate_pvs(const ScenarioConfig& cfg, int count, uint64_t seed) {
    std::vector<ParkedVehicle> out;
    const GeneratorParams& g = cfg.generator;
    int base_id = 1;
    for (const auto& p : cfg.pvs) base_id = std::max(base_id, p.id + 1);
    for (int i = 0; i < count; ++i) {
        ParkedVehicle p;
        p.id = base_id + i;
        p.pos.x = sample_field(seed, 1, p.id, 0, 0.0, g.area_m);
        p.pos.y = sample_field(seed, 1, p.id, 1, 0.0, g.area_m);
        p.cpu_hz = sample_field(seed, 1, p.id, 2, g.pv_freq_hz_min, g.pv_freq_hz_max);
        p.cycles_per_bit = g.cycles_per_bit;
        p.parked_s = sample_field(seed, 1, p.id, 3, g.parked_s_min, g.parked_s_max);
        p.arrival_hour = sample_hour(seed, p.id);
        out.push_back(p);
    }
    return out;
}

std::vector<Rsu> generate_rsus(const ScenarioConfig& cfg, int count, uint64_t seed) {
    std::vector<Rsu> out;
    const GeneratorParams& g = cfg.generator;
    int base_id = 1;
    for (const auto& r : cfg.rsus) base_id = std::max(base_id, r.id + 1);
    for (int i = 0; i < count; ++i) {
        Rsu r;
        r.id = base_id + i;
        r.pos.x = sample_field(seed, 2, r.id, 0, 0.0, g.area_m);
        r.pos.y = sample_field(seed, 2, r.id, 1, 0.0, g.area_m);
        r.cpu_hz = sample_field(seed, 2, r.id, 2, g.rsu_freq_hz_min, g.rsu_freq_hz_max);
        r.cycles_per_bit = g.cycles_per_bit;
        out.push_back(r);
    }
    return out;
}

std::vector<RequestingVehicle> generate_rvs(const ScenarioConfig& cfg, int count, uint64_t seed) {
    std::vector<RequestingVehicle> out;
    const GeneratorParams& g = cfg.generator;
    int base_id = 1;
    for (const auto& v : cfg.rvs) base_id = std::max(base_id, v.id + 1);
    for (int i = 0; i < count; ++i) {
        RequestingVehicle v;
        v.id = base_id + i;
        v.pos.x = sample_field(seed, 3, v.id, 0, 0.0, g.area_m);
        v.pos.y = sample_field(seed, 3, v.id, 1, 0.0, g.area_m);
        v.task_bits = mb_to_bits(sample_field(seed, 3, v.id, 2, g.task_mb_min, g.task_mb_max));
        v.max_time_s = sample_field(seed, 3, v.id, 3, g.tolerance_s_min, g.tolerance_s_max);
        v.alpha = g.alpha;
        out.push_back(v);
    }
    return out;
}

namespace {

void apply_kv(ScenarioConfig& cfg, const std::string& section, const std::string& key,
              const std::vector<std::string>& toks, const std::string& where,
              std::vector<RawEntity>& raw, std::map<std::string, int>& gen_counts) {
    auto one = [&]() -> const std::string& {
        if (toks.size() != 1) fail("expected one value for " + key + " in " + where);
        return toks[0];
    };
    auto num = [&]() { return parse_double(one(), where); };

    // entity lines are recognized anywhere in the file
    if (key == "pv" || key == "rsu" || key == "rv") {
        raw.push_back({key, toks, where});
        return;
    }
    if (key == "generate_pvs" || key == "generate_rsus" || key == "generate_rvs") {
        gen_counts[key] = static_cast<int>(parse_int(one(), where));
        return;
    }
    if (section.empty()) {
        if (key == "seed") { cfg.rng_seed = static_cast<uint64_t>(parse_int(one(), where)); return; }
        fail("unknown key '" + key + "' in " + where);
    }
    if (section == "channel") {
        ChannelParams& c = cfg.channel;
        if (key == "bandwidth_mb") c.bandwidth_mb = num();
        else if (key == "tx_power_w") c.tx_power_w = num();
        else if (key == "transceiver_eta") c.transceiver_eta = num();
        else if (key == "ref_distance_m") c.ref_distance_m = num();
        else if (key == "noise_w") c.noise_w = num();
        else if (key == "pathloss_exp") c.pathloss_exp = num();
        else fail("unknown channel key '" + key + "' in " + where);
        return;
    }
    if (section == "costs") {
        ConsensusCostParams& c = cfg.costs;
        if (key == "sig_cycles") c.sig_cycles = num();
        else if (key == "mac_cycles") c.mac_cycles = num();
        else if (key == "block_size_mb") { c.block_bits = mb_to_bits(num()); }
        else if (key == "tx_size_kb") c.tx_bits = num() * kBitsPerKb;
        else if (key == "rsu_block_size_mb") c.rsu_block_bits = mb_to_bits(num());
        else if (key == "cap_switch_vehicle") c.cap_switch_vehicle = num();
        else if (key == "cap_switch_rsu") c.cap_switch_rsu = num();
        else if (key == "energy_price_vehicle") c.energy_price_vehicle = num();
        else if (key == "energy_price_rsu") c.energy_price_rsu = num();
        else if (key == "vote_bytes") c.vote_bits = num() * 8.0;
        else fail("unknown costs key '" + key + "' in " + where);
        return;
    }
    if (section == "parking") {
        if (key == "arg_mode") {
            const std::string& v = one();
            if (v == "theta_pow_kappa") cfg.parking.arg_mode = GammaArgMode::theta_pow_kappa;
            else if (v == "theta") cfg.parking.arg_mode = GammaArgMode::theta;
            else fail("unknown arg_mode '" + v + "' in " + where);
            return;
        }
        if (key == "hour") {
            if (toks.size() != 7) fail("hour row needs 7 values in " + where);
            GammaMixRow row;
            row.shape_short = parse_double(toks[1], where);
            row.scale_short = parse_double(toks[2], where);
            row.shape_long = parse_double(toks[3], where);
            row.scale_long = parse_double(toks[4], where);
            row.weight_short = parse_double(toks[5], where);
            row.weight_long = parse_double(toks[6], where);
            if (toks[0] == "*") {
                cfg.parking.hours.fill(row);
            } else {
                long long h = parse_int(toks[0], where);
                if (h < 0 || h > 23) fail("hour index out of 0..23 in " + where);
                cfg.parking.hours[static_cast<size_t>(h)] = row;
            }
            return;
        }
        fail("unknown parking key '" + key + "' in " + where);
    }
    if (section == "selection") {
        SelectionParams& s = cfg.selection;
        if (key == "stay_threshold") s.stay_threshold = num();
        else if (key == "horizon_s") s.horizon_s = num();
        else if (key == "snr_threshold") {
            if (one() == "auto") s.snr_threshold_auto = true;
            else { s.snr_threshold = num(); s.snr_threshold_auto = false; }
        }
        else if (key == "adjacency_range_m") s.adjacency_range_m = num();
        else if (key == "w1") s.w1 = num();
        else if (key == "w2") s.w2 = num();
        else if (key == "strategy") {
            const std::string& v = one();
            if (v == "cds") s.strategy = SelectionStrategy::cds;
            else if (v == "random") s.strategy = SelectionStrategy::random;
            else if (v == "capacity_only") s.strategy = SelectionStrategy::capacity_only;
            else if (v == "communication_only") s.strategy = SelectionStrategy::communication_only;
            else fail("unknown strategy '" + v + "' in " + where);
        }
        else fail("unknown selection key '" + key + "' in " + where);
        return;
    }
    if (section == "game") {
        GameSolverParams& g = cfg.game;
        if (key == "lr_pa") g.lr_pa = num();
        else if (key == "lr_rsu") g.lr_rsu = num();
        else if (key == "shrink_pa") g.shrink_pa = num();
        else if (key == "shrink_rsu") g.shrink_rsu = num();
        else if (key == "tolerance") g.tolerance = num();
        else if (key == "max_iters") g.max_iters = static_cast<int>(parse_int(one(), where));
        else if (key == "price_floor") g.price_floor = num();
        else if (key == "price_cap") g.price_cap = num();
        else if (key == "consensus_term_sign") {
            const std::string& v = one();
            if (v == "minus_as_defined") g.consensus_sign = ConsensusTermSign::minus_as_defined;
            else if (v == "plus_as_printed") g.consensus_sign = ConsensusTermSign::plus_as_printed;
            else fail("unknown consensus_term_sign '" + v + "' in " + where);
        }
        else fail("unknown game key '" + key + "' in " + where);
        return;
    }
    if (section == "generator") {
        GeneratorParams& g = cfg.generator;
        auto range = [&](double& lo, double& hi) {
            if (toks.size() != 2) fail("expected two values for " + key + " in " + where);
            lo = parse_double(toks[0], where);
            hi = parse_double(toks[1], where);
        };
        if (key == "area_m") g.area_m = num();
        else if (key == "pv_freq_hz") range(g.pv_freq_hz_min, g.pv_freq_hz_max);
        else if (key == "rsu_freq_hz") range(g.rsu_freq_hz_min, g.rsu_freq_hz_max);
        else if (key == "task_mb") range(g.task_mb_min, g.task_mb_max);
        else if (key == "tolerance_s") range(g.tolerance_s_min, g.tolerance_s_max);
        else if (key == "parked_s") range(g.parked_s_min, g.parked_s_max);
        else if (key == "cycles_per_bit") g.cycles_per_bit = num();
        else if (key == "alpha") g.alpha = num();
        else if (key == "local_cpu_hz") g.local_cpu_hz = num();
        else if (key == "local_cycles_per_bit") g.local_cycles_per_bit = num();
        else fail("unknown generator key '" + key + "' in " + where);
        return;
    }
    fail("unknown section [" + section + "] in " + where);
}

void materialize_entities(ScenarioConfig& cfg, const std::vector<RawEntity>& raw,
                          const std::map<std::string, int>& gen_counts) {
    const GeneratorParams& g = cfg.generator;
    for (const auto& e : raw) {
        const auto& f = e.fields;
        if (f.size() < 3) fail(e.kind + " line needs at least id x y in " + e.where);
        int id = static_cast<int>(parse_int(f[0], e.where));
        Vec2 pos{parse_double(f[1], e.where), parse_double(f[2], e.where)};
        if (e.kind == "pv") {
            ParkedVehicle p;
            p.id = id;
            p.pos = pos;
            p.cpu_hz = f.size() > 3 ? parse_double(f[3], e.where)
                                    : sample_field(cfg.rng_seed, 1, id, 2, g.pv_freq_hz_min, g.pv_freq_hz_max);
            p.cycles_per_bit = f.size() > 4 ? parse_double(f[4], e.where) : g.cycles_per_bit;
            p.parked_s = f.size() > 5 ? parse_double(f[5], e.where)
                                      : sample_field(cfg.rng_seed, 1, id, 3, g.parked_s_min, g.parked_s_max);
            p.arrival_hour = f.size() > 6 ? static_cast<int>(parse_int(f[6], e.where))
                                          : sample_hour(cfg.rng_seed, id);
            cfg.pvs.push_back(p);
        } else if (e.kind == "rsu") {
            Rsu r;
            r.id = id;
            r.pos = pos;
            r.cpu_hz = f.size() > 3 ? parse_double(f[3], e.where)
                                    : sample_field(cfg.rng_seed, 2, id, 2, g.rsu_freq_hz_min, g.rsu_freq_hz_max);
            r.cycles_per_bit = f.size() > 4 ? parse_double(f[4], e.where) : g.cycles_per_bit;
            cfg.rsus.push_back(r);
        } else {
            RequestingVehicle v;
            v.id = id;
            v.pos = pos;
            v.task_bits = f.size() > 3
                              ? mb_to_bits(parse_double(f[3], e.where))
                              : mb_to_bits(sample_field(cfg.rng_seed, 3, id, 2, g.task_mb_min, g.task_mb_max));
            v.max_time_s = f.size() > 4 ? parse_double(f[4], e.where)
                                        : sample_field(cfg.rng_seed, 3, id, 3, g.tolerance_s_min,
                                                       g.tolerance_s_max);
            v.alpha = f.size() > 5 ? parse_double(f[5], e.where) : g.alpha;
            cfg.rvs.push_back(v);
        }
    }
    if (auto it = gen_counts.find("generate_pvs"); it != gen_counts.end()) {
        auto extra = generate_pvs(cfg, it->second, cfg.rng_seed);
        cfg.pvs.insert(cfg.pvs.end(), extra.begin(), extra.end());
    }
    if (auto it = gen_counts.find("generate_rsus"); it != gen_counts.end()) {
        auto extra = generate_rsus(cfg, it->second, cfg.rng_seed);
        cfg.rsus.insert(cfg.rsus.end(), extra.begin(), extra.end());
    }
    if (auto it = gen_counts.find("generate_rvs"); it != gen_counts.end()) {
        auto extra = generate_rvs(cfg, it->second, cfg.rng_seed);
        cfg.rvs.insert(cfg.rvs.end(), extra.begin(), extra.end());
    }
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in) {
    ScenarioConfig cfg;
    std::vector<RawEntity> raw;
    std::map<std::string, int> gen_counts;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header in " + where);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value in " + where);
        std::string key = trim(line.substr(0, eq));
        std::vector<std::string> toks = split_ws(trim(line.substr(eq + 1)));
        if (key.empty() || toks.empty()) fail("expected key = value in " + where);
        apply_kv(cfg, section, key, toks, where, raw, gen_counts);
    }
    materialize_entities(cfg, raw, gen_counts);
    if (cfg.selection.snr_threshold_auto)
        cfg.selection.snr_threshold = snr_at_distance(cfg.selection.adjacency_range_m, cfg.channel);
    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return parse_scenario(in);
}

void validate_scenario(const ScenarioConfig& cfg) {
    auto bad = [](const std::string& field) {
        throw std::runtime_error("scenario validation: " + field);
    };
    const ChannelParams& c = cfg.channel;
    if (c.bandwidth_mb <= 0) bad("channel.bandwidth_mb must be positive");
    if (c.tx_power_w <= 0) bad("channel.tx_power_w must be positive");
    if (c.transceiver_eta <= 0) bad("channel.transceiver_eta must be positive");
    if (c.ref_distance_m <= 0) bad("channel.ref_distance_m must be positive");
    if (c.noise_w <= 0) bad("channel.noise_w must be positive");
    if (c.pathloss_exp < 1) bad("channel.pathloss_exp must be >= 1");

    const ConsensusCostParams& k = cfg.costs;
    if (k.sig_cycles <= 0) bad("costs.sig_cycles must be positive");
    if (k.mac_cycles <= 0) bad("costs.mac_cycles must be positive");
    if (k.tx_bits <= 0) bad("costs.tx_size_kb must be positive");
    if (k.block_bits < k.tx_bits) bad("costs.block_size_mb must be >= tx size");
    if (k.rsu_block_bits < k.tx_bits) bad("costs.rsu_block_size_mb must be >= tx size");
    for (double ratio : {k.block_bits / k.tx_bits, k.rsu_block_bits / k.tx_bits}) {
        double r = std::round(ratio);
        if (r < 1.0 || std::fabs(ratio - r) > 1e-9 * std::max(1.0, ratio))
            bad("costs: transactions per block must round to a positive integer");
    }
    if (k.cap_switch_vehicle <= 0) bad("costs.cap_switch_vehicle must be positive");
    if (k.cap_switch_rsu <= 0) bad("costs.cap_switch_rsu must be positive");
    if (k.energy_price_vehicle < 0) bad("costs.energy_price_vehicle must be non-negative");
    if (k.energy_price_rsu < 0) bad("costs.energy_price_rsu must be non-negative");
    if (k.vote_bits <= 0) bad("costs.vote_bytes must be positive");

    validate_parking(cfg.parking);

    const SelectionParams& s = cfg.selection;
    if (!(s.stay_threshold > 0 && s.stay_threshold <= 1)) bad("selection.stay_threshold must be in (0,1]");
    if (s.horizon_s < 0) bad("selection.horizon_s must be non-negative");
    if (s.w1 < 0 || s.w2 < 0) bad("selection weights must be non-negative");
    if (std::fabs(s.w1 + s.w2 - 1.0) > 1e-12) bad("selection.w1 + w2 must equal 1");
    if (s.snr_threshold < 0) bad("selection.snr_threshold must be non-negative");
    if (s.adjacency_range_m <= 0) bad("selection.adjacency_range_m must be positive");

    const GameSolverParams& g = cfg.game;
    if (g.lr_pa <= 0 || g.lr_rsu <= 0) bad("game learning rates must be positive");
    if (g.shrink_pa <= 1 || g.shrink_rsu <= 1) bad("game shrink factors must be > 1");
    if (g.tolerance <= 0) bad("game.tolerance must be positive");
    if (g.max_iters < 1) bad("game.max_iters must be >= 1");
    if (g.price_floor <= 0) bad("game.price_floor must be positive");
    if (g.price_cap <= g.price_floor) bad("game.price_cap must exceed price_floor");

    const GeneratorParams& gen = cfg.generator;
    if (gen.area_m <= 0) bad("generator.area_m must be positive");
    if (gen.pv_freq_hz_min <= 0 || gen.pv_freq_hz_max < gen.pv_freq_hz_min) bad("generator.pv_freq_hz range invalid");
    if (gen.rsu_freq_hz_min <= 0 || gen.rsu_freq_hz_max < gen.rsu_freq_hz_min) bad("generator.rsu_freq_hz range invalid");
    if (gen.task_mb_min <= 0 || gen.task_mb_max < gen.task_mb_min) bad("generator.task_mb range invalid");
    if (gen.tolerance_s_min <= 0 || gen.tolerance_s_max < gen.tolerance_s_min) bad("generator.tolerance_s range invalid");
    if (gen.parked_s_min < 0 || gen.parked_s_max < gen.parked_s_min) bad("generator.parked_s range invalid");
    if (gen.cycles_per_bit <= 0) bad("generator.cycles_per_bit must be positive");
    if (gen.alpha <= 0) bad("generator.alpha must be positive");
    if (gen.local_cpu_hz <= 0) bad("generator.local_cpu_hz must be positive");
    if (gen.local_cycles_per_bit <= 0) bad("generator.local_cycles_per_bit must be positive");

    if (cfg.rvs.empty()) bad("rvs empty");
    if (cfg.pvs.empty()) bad("pvs empty");
    if (cfg.rsus.empty()) bad("rsus empty");

    std::set<int> ids;
    for (const auto& p : cfg.pvs) {
        if (!ids.insert(p.id).second) bad("pv id " + std::to_string(p.id) + " duplicated");
        if (p.cpu_hz < gen.pv_freq_hz_min || p.cpu_hz > gen.pv_freq_hz_max)
            bad("pv " + std::to_string(p.id) + ": cpu_hz outside generator.pv_freq_hz range");
        if (p.cycles_per_bit <= 0) bad("pv " + std::to_string(p.id) + ": cycles_per_bit must be positive");
        if (p.parked_s < 0) bad("pv " + std::to_string(p.id) + ": parked_s must be non-negative");
        if (p.arrival_hour < 0 || p.arrival_hour > 23)
            bad("pv " + std::to_string(p.id) + ": arrival_hour outside 0..23");
    }
    ids.clear();
    for (const auto& r : cfg.rsus) {
        if (!ids.insert(r.id).second) bad("rsu id " + std::to_string(r.id) + " duplicated");
        if (r.cpu_hz <= 0) bad("rsu " + std::to_string(r.id) + ": cpu_hz must be positive");
        if (r.cycles_per_bit <= 0) bad("rsu " + std::to_string(r.id) + ": cycles_per_bit must be positive");
    }
    ids.clear();
    for (const auto& v : cfg.rvs) {
        if (!ids.insert(v.id).second) bad("rv id " + std::to_string(v.id) + " duplicated");
        if (v.task_bits <= 0) bad("rv " + std::to_string(v.id) + ": task size must be positive");
        if (v.max_time_s <= 0) bad("rv " + std::to_string(v.id) + ": max_time_s must be positive");
        if (v.alpha <= 0) bad("rv " + std::to_string(v.id) + ": alpha must be positive");
    }
}

void save_scenario(const ScenarioConfig& cfg, std::ostream& out) {
    auto d = fmt_double;
    out << "seed = " << cfg.rng_seed << "\n\n";

    const ChannelParams& c = cfg.channel;
    out << "[channel]\n";
    out << "bandwidth_mb = " << d(c.bandwidth_mb) << "\n";
    out << "tx_power_w = " << d(c.tx_power_w) << "\n";
    out << "transceiver_eta = " << d(c.transceiver_eta) << "\n";
    out << "ref_distance_m = " << d(c.ref_distance_m) << "\n";
    out << "noise_w = " << d(c.noise_w) << "\n";
    out << "pathloss_exp = " << d(c.pathloss_exp) << "\n\n";

    const ConsensusCostParams& k = cfg.costs;
    out << "[costs]\n";
    out << "sig_cycles = " << d(k.sig_cycles) << "\n";
    out << "mac_cycles = " << d(k.mac_cycles) << "\n";
    out << "block_size_mb = " << d(bits_to_mb(k.block_bits)) << "\n";
    out << "tx_size_kb = " << d(k.tx_bits / kBitsPerKb) << "\n";
    out << "rsu_block_size_mb = " << d(bits_to_mb(k.rsu_block_bits)) << "\n";
    out << "cap_switch_vehicle = " << d(k.cap_switch_vehicle) << "\n";
    out << "cap_switch_rsu = " << d(k.cap_switch_rsu) << "\n";
    out << "energy_price_vehicle = " << d(k.energy_price_vehicle) << "\n";
    out << "energy_price_rsu = " << d(k.energy_price_rsu) << "\n";
    out << "vote_bytes = " << d(k.vote_bits / 8.0) << "\n\n";

    out << "[parking]\n";
    out << "arg_mode = "
        << (cfg.parking.arg_mode == GammaArgMode::theta_pow_kappa ? "theta_pow_kappa" : "theta") << "\n";
    bool uniform = std::all_of(cfg.parking.hours.begin(), cfg.parking.hours.end(),
                               [&](const GammaMixRow& r) { return r == cfg.parking.hours[0]; });
    auto hour_row = [&](const std::string& tag, const GammaMixRow& r) {
        out << "hour = " << tag << " " << d(r.shape_short) << " " << d(r.scale_short) << " "
            << d(r.shape_long) << " " << d(r.scale_long) << " " << d(r.weight_short) << " "
            << d(r.weight_long) << "\n";
    };
    if (uniform) {
        hour_row("*", cfg.parking.hours[0]);
    } else {
        for (size_t h = 0; h < cfg.parking.hours.size(); ++h)
            hour_row(std::to_string(h), cfg.parking.hours[h]);
    }
    out << "\n";

    const SelectionParams& s = cfg.selection;
    out << "[selection]\n";
    out << "stay_threshold = " << d(s.stay_threshold) << "\n";
    out << "horizon_s = " << d(s.horizon_s) << "\n";
    if (s.snr_threshold_auto) out << "snr_threshold = auto\n";
    else out << "snr_threshold = " << d(s.snr_threshold) << "\n";
    out << "adjacency_range_m = " << d(s.adjacency_range_m) << "\n";
    out << "w1 = " << d(s.w1) << "\n";
    out << "w2 = " << d(s.w2) << "\n";
    const char* strat = s.strategy == SelectionStrategy::cds                ? "cds"
                        : s.strategy == SelectionStrategy::random           ? "random"
                        : s.strategy == SelectionStrategy::capacity_only    ? "capacity_only"
                                                                            : "communication_only";
    out << "strategy = " << strat << "\n\n";

    const GameSolverParams& g = cfg.game;
    out << "[game]\n";
    out << "lr_pa = " << d(g.lr_pa) << "\n";
    out << "lr_rsu = " << d(g.lr_rsu) << "\n";
    out << "shrink_pa = " << d(g.shrink_pa) << "\n";
    out << "shrink_rsu = " << d(g.shrink_rsu) << "\n";
    out << "tolerance = " << d(g.tolerance) << "\n";
    out << "max_iters = " << g.max_iters << "\n";
    out << "price_floor = " << d(g.price_floor) << "\n";
    out << "price_cap = " << d(g.price_cap) << "\n";
    out << "consensus_term_sign = "
        << (g.consensus_sign == ConsensusTermSign::minus_as_defined ? "minus_as_defined"
                                                                    : "plus_as_printed")
        << "\n\n";

    const GeneratorParams& gen = cfg.generator;
    out << "[generator]\n";
    out << "area_m = " << d(gen.area_m) << "\n";
    out << "pv_freq_hz = " << d(gen.pv_freq_hz_min) << " " << d(gen.pv_freq_hz_max) << "\n";
    out << "rsu_freq_hz = " << d(gen.rsu_freq_hz_min) << " " << d(gen.rsu_freq_hz_max) << "\n";
    out << "task_mb = " << d(gen.task_mb_min) << " " << d(gen.task_mb_max) << "\n";
    out << "tolerance_s = " << d(gen.tolerance_s_min) << " " << d(gen.tolerance_s_max) << "\n";
    out << "parked_s = " << d(gen.parked_s_min) << " " << d(gen.parked_s_max) << "\n";
    out << "cycles_per_bit = " << d(gen.cycles_per_bit) << "\n";
    out << "alpha = " << d(gen.alpha) << "\n";
    out << "local_cpu_hz = " << d(gen.local_cpu_hz) << "\n";
    out << "local_cycles_per_bit = " << d(gen.local_cycles_per_bit) << "\n\n";

    for (const auto& p : cfg.pvs)
        out << "pv = " << p.id << " " << d(p.pos.x) << " " << d(p.pos.y) << " " << d(p.cpu_hz) << " "
            << d(p.cycles_per_bit) << " " << d(p.parked_s) << " " << p.arrival_hour << "\n";
    for (const auto& r : cfg.rsus)
        out << "rsu = " << r.id << " " << d(r.pos.x) << " " << d(r.pos.y) << " " << d(r.cpu_hz) << " "
            << d(r.cycles_per_bit) << "\n";
    for (const auto& v : cfg.rvs)
        out << "rv = " << v.id << " " << d(v.pos.x) << " " << d(v.pos.y) << " "
            << d(bits_to_mb(v.task_bits)) << " " << d(v.max_time_s) << " " << d(v.alpha) << "\n";
}

std::string scenario_text(const ScenarioConfig& cfg) {
    std::ostringstream os;
    save_scenario(cfg, os);
    return os.str();
}

std::string scenario_json(const ScenarioConfig& cfg) {
    using nlohmann::json;
    json j;
    j["seed"] = cfg.rng_seed;
    const ChannelParams& c = cfg.channel;
    j["channel"] = {{"bandwidth_mb", c.bandwidth_mb},   {"tx_power_w", c.tx_power_w},
                    {"transceiver_eta", c.transceiver_eta}, {"ref_distance_m", c.ref_distance_m},
                    {"noise_w", c.noise_w},             {"pathloss_exp", c.pathloss_exp}};
    const ConsensusCostParams& k = cfg.costs;
    j["costs"] = {{"sig_cycles", k.sig_cycles},
                  {"mac_cycles", k.mac_cycles},
                  {"block_bits", k.block_bits},
                  {"tx_bits", k.tx_bits},
                  {"rsu_block_bits", k.rsu_block_bits},
                  {"tx_per_block", k.tx_per_block()},
                  {"cap_switch_vehicle", k.cap_switch_vehicle},
                  {"cap_switch_rsu", k.cap_switch_rsu},
                  {"energy_price_vehicle", k.energy_price_vehicle},
                  {"energy_price_rsu", k.energy_price_rsu},
                  {"vote_bits", k.vote_bits}};
    j["parking"] = {{"arg_mode", cfg.parking.arg_mode == GammaArgMode::theta_pow_kappa
                                     ? "theta_pow_kappa"
                                     : "theta"}};
    json hours = json::array();
    for (const auto& r : cfg.parking.hours)
        hours.push_back({r.shape_short, r.scale_short, r.shape_long, r.scale_long, r.weight_short,
                         r.weight_long});
    j["parking"]["hours"] = hours;
    const SelectionParams& s = cfg.selection;
    j["selection"] = {{"stay_threshold", s.stay_threshold},
                      {"horizon_s", s.horizon_s},
                      {"snr_threshold", s.snr_threshold},
                      {"snr_threshold_auto", s.snr_threshold_auto},
                      {"adjacency_range_m", s.adjacency_range_m},
                      {"w1", s.w1},
                      {"w2", s.w2}};
    const GameSolverParams& g = cfg.game;
    j["game"] = {{"lr_pa", g.lr_pa},
                 {"lr_rsu", g.lr_rsu},
                 {"shrink_pa", g.shrink_pa},
                 {"shrink_rsu", g.shrink_rsu},
                 {"tolerance", g.tolerance},
                 {"max_iters", g.max_iters},
                 {"price_floor", g.price_floor},
                 {"price_cap", g.price_cap},
                 {"consensus_term_sign", g.consensus_sign == ConsensusTermSign::minus_as_defined
                                             ? "minus_as_defined"
                                             : "plus_as_printed"}};
    json pvs = json::array();
    for (const auto& p : cfg.pvs)
        pvs.push_back({{"id", p.id},
                       {"x", p.pos.x},
                       {"y", p.pos.y},
                       {"cpu_hz", p.cpu_hz},
                       {"cycles_per_bit", p.cycles_per_bit},
                       {"parked_s", p.parked_s},
                       {"arrival_hour", p.arrival_hour}});
    j["pvs"] = pvs;
    json rsus = json::array();
    for (const auto& r : cfg.rsus)
        rsus.push_back({{"id", r.id},
                        {"x", r.pos.x},
                        {"y", r.pos.y},
                        {"cpu_hz", r.cpu_hz},
                        {"cycles_per_bit", r.cycles_per_bit}});
    j["rsus"] = rsus;
    json rvs = json::array();
    for (const auto& v : cfg.rvs)
        rvs.push_back({{"id", v.id},
                       {"x", v.pos.x},
                       {"y", v.pos.y},
                       {"task_bits", v.task_bits},
                       {"max_time_s", v.max_time_s},
                       {"alpha", v.alpha}});
    j["rvs"] = rvs;
    return j.dump(2);
}

uint64_t scenario_hash(const ScenarioConfig& cfg) {
    std::string text = scenario_text(cfg);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::pair<std::vector<double>, std::vector<double>> compute_capacity_shares(
    const std::vector<ParkedVehicle>& pvs, const std::vector<Rsu>& rsus) {
    if (pvs.empty()) throw std::invalid_argument("compute_capacity_shares: pvs empty");
    if (rsus.empty()) throw std::invalid_argument("compute_capacity_shares: rsus empty");
    double pv_total = 0.0, rsu_total = 0.0;
    for (const auto& p : pvs) pv_total += p.cpu_hz;
    for (const auto& r : rsus) rsu_total += r.cpu_hz;
    std::vector<double> phi_pv, phi_rsu;
    phi_pv.reserve(pvs.size());
    phi_rsu.reserve(rsus.size());
    for (const auto& p : pvs) phi_pv.push_back(p.cpu_hz / pv_total);
    for (const auto& r : rsus) phi_rsu.push_back(r.cpu_hz / rsu_total);
    return {std::move(phi_pv), std::move(phi_rsu)};
}

}  // namespace bpvec
