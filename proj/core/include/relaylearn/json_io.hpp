#pragma once

#include <string>

#include "relaylearn/exponent.hpp"
#include "relaylearn/harness.hpp"

namespace relay {

// JSON forms. Parsers reject unknown fields by name and report malformed
// JSON with line and column. All take/produce full documents as text so the
// JSON library stays an implementation detail.
//
// channel:    {"kind":"bsc","p":0.2}
//             {"kind":"reverse_z","q":0.8}
//             {"kind":"general","row0":[...],"row1":[...]}
// protocol:   {"kind":"bsc-block","k":16,"P":{...},"Q":{...}}   (+"s_bar" for dmc-block)
// experiment: {"protocol":{...},"decoder":"block-ml","n_grid":[...],
//              "trials":100000,"seed":1,"min_errors":50,"threads":0}
//              (+"epsilon" for epsilon-majority)

ChannelSpec channel_spec_from_json(const std::string& text);
std::string channel_spec_to_json(const ChannelSpec& spec);

ProtocolSpec protocol_spec_from_json(const std::string& text);
std::string protocol_spec_to_json(const ProtocolSpec& spec);

ExperimentConfig experiment_config_from_json(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);

std::string exponent_report_to_json(const ExponentReport& report);

}  // namespace relay
