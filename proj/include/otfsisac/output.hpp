#pragma once

#include <string>
#include <vector>

#include "otfsisac/config.hpp"
#include "otfsisac/simulation.hpp"

namespace otfsisac {

/// Column order of records.csv.
inline constexpr const char* kRecordsHeader =
    "trial,block,scheme,snr_db,bits_sent,bit_errors,l_true,l_hat,k_true,k_hat,theta_true_deg,theta_hat_deg";

/// records.csv content: header plus one line per record, in the given order.
std::string records_csv(const std::vector<BlockRecord>& records);

/// Aggregates per scheme and SNR point, with config echo and seed.
std::string summary_json(const std::vector<BlockRecord>& records, const ScenarioConfig& cfg);

/// Log-y BER versus SNR, one polyline per scheme.
std::string ber_svg(const std::vector<BlockRecord>& records);

/// Writes records.csv and summary.json (and ber_curve.svg when `plot`) into
/// `out_dir`, creating it if needed.
void emit_results(const std::vector<BlockRecord>& records, const ScenarioConfig& cfg, const std::string& out_dir,
                  bool plot = true);

}  // namespace otfsisac
