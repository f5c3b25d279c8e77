#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bpvec/channel.hpp"
#include "bpvec/geometry.hpp"
#include "bpvec/parking.hpp"

namespace bpvec {

// Cycle and energy constants for the consensus cost model. beta/theta are
// the CPU cycles to generate or verify one signature / one MAC; crypto is
// never computed, only charged.
struct ConsensusCostParams {
    double sig_cycles = 1e6;               // beta
    double mac_cycles = 1e7;               // theta
    double block_bits = 4.0 * kBitsPerMb;  // D_Bv
    double tx_bits = 1.0 * kBitsPerKb;     // varpi
    double rsu_block_bits = 4.0 * kBitsPerMb;  // D_Br, defaults to D_Bv
    double cap_switch_vehicle = 1e-27;     // kappa_v
    double cap_switch_rsu = 1e-28;         // kappa_r
    double energy_price_vehicle = 0.1;     // xi_v, cost per joule
    double energy_price_rsu = 0.05;        // xi_r
    double vote_bits = 256.0 * 8.0;        // simulated vote message size

    // Transactions per block, rounded; validated to be a positive integer.
    double tx_per_block() const;
    double rsu_tx_per_block() const;

    friend bool operator==(const ConsensusCostParams&, const ConsensusCostParams&) = default;
};

struct ParkedVehicle {
    int id = 0;
    Vec2 pos;
    double cpu_hz = 0.0;          // f_pk
    double cycles_per_bit = 24.0; // C_pk
    double parked_s = 0.0;        // time already parked
    int arrival_hour = 0;

    friend bool operator==(const ParkedVehicle&, const ParkedVehicle&) = default;
};

struct Rsu {
    int id = 0;
    Vec2 pos;
    double cpu_hz = 0.0;          // f_rj
    double cycles_per_bit = 24.0; // C_rj

    friend bool operator==(const Rsu&, const Rsu&) = default;
};

struct RequestingVehicle {
    int id = 0;
    Vec2 pos;
    double task_bits = 0.0;  // D_qi
    double max_time_s = 0.0; // T_maxi
    double alpha = 1.0;      // satisfaction weight

    friend bool operator==(const RequestingVehicle&, const RequestingVehicle&) = default;
};

enum class SelectionStrategy { cds, random, capacity_only, communication_only };

struct SelectionParams {
    double stay_threshold = 0.95;  // p_th
    double horizon_s = 1800.0;     // tau_th
    double snr_threshold = 0.0;    // resolved at load when auto
    bool snr_threshold_auto = true;
    double adjacency_range_m = 300.0;  // range defining the auto threshold
    double w1 = 0.5;
    double w2 = 0.5;
    SelectionStrategy strategy = SelectionStrategy::cds;

    friend bool operator==(const SelectionParams&, const SelectionParams&) = default;
};

enum class ConsensusTermSign { minus_as_defined, plus_as_printed };

struct GameSolverParams {
    double lr_pa = 1e-2;     // mu_1, in price-floor units
    double lr_rsu = 1e-2;    // mu_2
    double shrink_pa = 2.0;  // omega_1
    double shrink_rsu = 2.0; // omega_2
    double tolerance = 1e-8; // vartheta, relative squared change
    int max_iters = 100000;
    double price_floor = 0.1;
    double price_cap = 50.0;
    ConsensusTermSign consensus_sign = ConsensusTermSign::minus_as_defined;

    friend bool operator==(const GameSolverParams&, const GameSolverParams&) = default;
};

// Sampling ranges used to fill absent entity fields and to synthesize
// entities for count sweeps. local_* are the requesting vehicle's own CPU,
// used only by the local/hybrid baseline schemes.
struct GeneratorParams {
    double area_m = 600.0;
    double pv_freq_hz_min = 1e9, pv_freq_hz_max = 2.5e9;
    double rsu_freq_hz_min = 4e9, rsu_freq_hz_max = 6e9;
    double task_mb_min = 10.0, task_mb_max = 30.0;
    double tolerance_s_min = 0.1, tolerance_s_max = 0.2;
    double parked_s_min = 0.0, parked_s_max = 7200.0;
    double cycles_per_bit = 24.0;
    double alpha = 1.0;
    double local_cpu_hz = 0.8e9;
    double local_cycles_per_bit = 24.0;

    friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

struct ScenarioConfig {
    uint64_t rng_seed = 0;
    ChannelParams channel;
    ConsensusCostParams costs;
    ParkingMixture parking;
    SelectionParams selection;
    GameSolverParams game;
    GeneratorParams generator;
    std::vector<ParkedVehicle> pvs;
    std::vector<Rsu> rsus;
    std::vector<RequestingVehicle> rvs;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(std::istream& in);

void save_scenario(const ScenarioConfig& cfg, std::ostream& out);
std::string scenario_text(const ScenarioConfig& cfg);

// Normalized JSON echo of a loaded config, for reproducibility records.
std::string scenario_json(const ScenarioConfig& cfg);

// FNV-1a over the canonical text form; used in run manifests.
uint64_t scenario_hash(const ScenarioConfig& cfg);

void validate_scenario(const ScenarioConfig& cfg);

// Capacity proportions phi_pk = f_pk / sum f, phi_rj = f_rj / sum f.
std::pair<std::vector<double>, std::vector<double>> compute_capacity_shares(
    const std::vector<ParkedVehicle>& pvs, const std::vector<Rsu>& rsus);

// Synthesize entities from the generator ranges (used by count sweeps and
// by the loader's generate_* convenience keys).
std::vector<ParkedVehicle> generate_pvs(const ScenarioConfig& cfg, int count, uint64_t seed);
std::vector<Rsu> generate_rsus(const ScenarioConfig& cfg, int count, uint64_t seed);
std::vector<RequestingVehicle> generate_rvs(const ScenarioConfig& cfg, int count, uint64_t seed);

}  // namespace bpvec
