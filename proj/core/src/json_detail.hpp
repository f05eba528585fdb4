#pragma once

#include <json.hpp>

#include <initializer_list>
#include <string>

#include "relaylearn/channel.hpp"
#include "relaylearn/exponent.hpp"
#include "relaylearn/harness.hpp"

// Node-level converters shared by json_io.cpp and cli.cpp. The vendored JSON
// library stays out of the installed headers.
namespace relay::detail {

using json = nlohmann::ordered_json;

// Parse a full document; on failure throws std::invalid_argument with the
// line and column of the offending byte.
json parse_document(const std::string& text);

// Requires every field in `required`, allows those in `optional`, and
// rejects anything else by name. `context` names the object in messages.
void check_fields(const json& obj, const char* context,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional);

double get_double(const json& obj, const char* context, const char* key);
long get_long(const json& obj, const char* context, const char* key);
std::uint64_t get_u64(const json& obj, const char* context, const char* key);
std::string get_string(const json& obj, const char* context, const char* key);

ChannelSpec channel_spec_from_node(const json& node, const char* context);
json channel_spec_to_node(const ChannelSpec& spec);

ProtocolSpec protocol_spec_from_node(const json& node);
json protocol_spec_to_node(const ProtocolSpec& spec);

ExperimentConfig experiment_config_from_node(const json& node);
json experiment_config_to_node(const ExperimentConfig& config);

json exponent_report_to_node(const ExponentReport& report);

}  // namespace relay::detail
