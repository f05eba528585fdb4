#include "relaylearn/json_io.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "json_detail.hpp"

namespace relay {
namespace detail {

namespace {

// nlohmann reports a 1-based byte offset; turn it into line and column.
void byte_to_line_col(const std::string& text, std::size_t byte, int* line,
                      int* col) {
  std::size_t pos = byte == 0 ? 0 : byte - 1;
  if (pos > text.size()) pos = text.size();
  int ln = 1, cl = 1;
  for (std::size_t i = 0; i < pos; ++i) {
    if (text[i] == '\n') {
      ++ln;
      cl = 1;
    } else {
      ++cl;
    }
  }
  *line = ln;
  *col = cl;
}

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

const json& get_field(const json& obj, const char* context, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(std::string("missing field \"") + key + "\" in " + context);
  }
  return *it;
}

std::vector<double> get_double_array(const json& obj, const char* context,
                                     const char* key) {
  const json& v = get_field(obj, context, key);
  if (!v.is_array()) {
    fail(std::string("field \"") + key + "\" in " + context +
         " must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) {
      fail(std::string("field \"") + key + "\" in " + context +
           " must be an array of numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    int line = 0, col = 0;
    byte_to_line_col(text, e.byte, &line, &col);
    fail("malformed JSON at line " + std::to_string(line) + ", column " +
         std::to_string(col));
  }
}

void check_fields(const json& obj, const char* context,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
  if (!obj.is_object()) {
    fail(std::string(context) + " must be a JSON object");
  }
  for (const char* key : required) {
    if (!obj.contains(key)) {
      fail(std::string("missing field \"") + key + "\" in " + context);
    }
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : required) {
      if (it.key() == key) known = true;
    }
    for (const char* key : optional) {
      if (it.key() == key) known = true;
    }
    if (!known) {
      fail(std::string("unknown field \"") + it.key() + "\" in " + context);
    }
  }
}

double get_double(const json& obj, const char* context, const char* key) {
  const json& v = get_field(obj, context, key);
  if (!v.is_number()) {
    fail(std::string("field \"") + key + "\" in " + context +
         " must be a number");
  }
  return v.get<double>();
}

long get_long(const json& obj, const char* context, const char* key) {
  const json& v = get_field(obj, context, key);
  if (!v.is_number_integer()) {
    fail(std::string("field \"") + key + "\" in " + context +
         " must be an integer");
  }
  return v.get<long>();
}

std::uint64_t get_u64(const json& obj, const char* context, const char* key) {
  const json& v = get_field(obj, context, key);
  if (!v.is_number_unsigned()) {
    fail(std::string("field \"") + key + "\" in " + context +
         " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* context, const char* key) {
  const json& v = get_field(obj, context, key);
  if (!v.is_string()) {
    fail(std::string("field \"") + key + "\" in " + context +
         " must be a string");
  }
  return v.get<std::string>();
}

ChannelSpec channel_spec_from_node(const json& node, const char* context) {
  if (!node.is_object()) {
    fail(std::string(context) + " must be a JSON object");
  }
  const std::string kind = get_string(node, context, "kind");
  if (kind == "bsc") {
    check_fields(node, context, {"kind", "p"}, {});
    return channel_spec_bsc(get_double(node, context, "p"));
  }
  if (kind == "reverse_z") {
    check_fields(node, context, {"kind", "q"}, {});
    return channel_spec_reverse_z(get_double(node, context, "q"));
  }
  if (kind == "general") {
    check_fields(node, context, {"kind", "row0", "row1"}, {});
    return channel_spec_general(get_double_array(node, context, "row0"),
                                get_double_array(node, context, "row1"));
  }
  fail(std::string("unknown channel kind \"") + kind + "\" in " + context);
}

json channel_spec_to_node(const ChannelSpec& spec) {
  json node;
  switch (spec.kind) {
    case ChannelSpec::Kind::Bsc:
      node["kind"] = "bsc";
      node["p"] = spec.param;
      break;
    case ChannelSpec::Kind::ReverseZ:
      node["kind"] = "reverse_z";
      node["q"] = spec.param;
      break;
    case ChannelSpec::Kind::General:
      node["kind"] = "general";
      node["row0"] = spec.dmc.row(0);
      node["row1"] = spec.dmc.row(1);
      break;
  }
  return node;
}

ProtocolSpec protocol_spec_from_node(const json& node) {
  const char* ctx = "protocol";
  if (!node.is_object()) fail("protocol must be a JSON object");
  const std::string kind_name = get_string(node, ctx, "kind");
  const ProtocolKind kind = protocol_kind_from_string(kind_name);
  const bool block =
      kind == ProtocolKind::BscBlock || kind == ProtocolKind::DmcBlock;
  if (block) {
    if (kind == ProtocolKind::DmcBlock) {
      check_fields(node, ctx, {"kind", "k", "P", "Q"}, {"s_bar"});
    } else {
      check_fields(node, ctx, {"kind", "k", "P", "Q"}, {});
    }
  } else {
    check_fields(node, ctx, {"kind", "P", "Q"}, {"k"});
  }
  const long k = node.contains("k") ? get_long(node, ctx, "k") : 1;
  if (k < 1 || k > 1 << 24) fail("field \"k\" in protocol is out of range");
  const ChannelSpec P =
      channel_spec_from_node(get_field(node, ctx, "P"), "protocol P");
  const ChannelSpec Q =
      channel_spec_from_node(get_field(node, ctx, "Q"), "protocol Q");
  std::optional<double> s_bar;
  if (node.contains("s_bar")) s_bar = get_double(node, ctx, "s_bar");
  return make_protocol_spec(kind, static_cast<int>(k), P, Q, s_bar);
}

json protocol_spec_to_node(const ProtocolSpec& spec) {
  json node;
  node["kind"] = protocol_kind_name(spec.kind);
  node["k"] = spec.k;
  node["P"] = channel_spec_to_node(spec.P);
  node["Q"] = channel_spec_to_node(spec.Q);
  if (spec.kind == ProtocolKind::DmcBlock) node["s_bar"] = spec.s_bar;
  return node;
}

ExperimentConfig experiment_config_from_node(const json& node) {
  const char* ctx = "experiment";
  check_fields(node, ctx, {"protocol", "decoder", "n_grid", "trials", "seed"},
               {"epsilon", "min_errors", "threads"});
  ProtocolSpec protocol =
      protocol_spec_from_node(get_field(node, ctx, "protocol"));
  const DecoderKind decoder =
      decoder_kind_from_string(get_string(node, ctx, "decoder"));
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  if (node.contains("epsilon")) epsilon = get_double(node, ctx, "epsilon");

  const json& grid = get_field(node, ctx, "n_grid");
  if (!grid.is_array() || grid.empty()) {
    fail("field \"n_grid\" in experiment must be a non-empty array");
  }
  std::vector<long> n_grid;
  n_grid.reserve(grid.size());
  for (const auto& e : grid) {
    if (!e.is_number_integer() || e.get<long>() < 1) {
      fail("field \"n_grid\" in experiment must hold positive integers");
    }
    n_grid.push_back(e.get<long>());
  }

  const long trials = get_long(node, ctx, "trials");
  if (trials < 1) fail("field \"trials\" in experiment must be positive");
  const std::uint64_t seed = get_u64(node, ctx, "seed");
  long min_errors = 50;
  if (node.contains("min_errors")) {
    min_errors = get_long(node, ctx, "min_errors");
    if (min_errors < 1) {
      fail("field \"min_errors\" in experiment must be positive");
    }
  }
  long threads = 0;
  if (node.contains("threads")) {
    threads = get_long(node, ctx, "threads");
    if (threads < 0) fail("field \"threads\" in experiment must be >= 0");
  }
  return ExperimentConfig{std::move(protocol),
                          decoder,
                          epsilon,
                          std::move(n_grid),
                          trials,
                          seed,
                          static_cast<int>(min_errors),
                          static_cast<int>(threads)};
}

json experiment_config_to_node(const ExperimentConfig& config) {
  json node;
  node["protocol"] = protocol_spec_to_node(config.protocol);
  node["decoder"] = decoder_kind_name(config.decoder);
  if (!std::isnan(config.epsilon)) node["epsilon"] = config.epsilon;
  node["n_grid"] = config.n_grid;
  node["trials"] = config.trials;
  node["seed"] = config.seed;
  node["min_errors"] = config.min_errors;
  node["threads"] = config.threads;
  return node;
}

json exponent_report_to_node(const ExponentReport& report) {
  json node;
  node["family"] = bound_family_name(report.family);
  node["s_star"] = report.s_star;
  node["mu_star"] = report.mu_star;
  node["rate"] = report.rate;
  return node;
}

}  // namespace detail

ChannelSpec channel_spec_from_json(const std::string& text) {
  return detail::channel_spec_from_node(detail::parse_document(text),
                                        "channel");
}

std::string channel_spec_to_json(const ChannelSpec& spec) {
  return detail::channel_spec_to_node(spec).dump(2);
}

ProtocolSpec protocol_spec_from_json(const std::string& text) {
  return detail::protocol_spec_from_node(detail::parse_document(text));
}

std::string protocol_spec_to_json(const ProtocolSpec& spec) {
  return detail::protocol_spec_to_node(spec).dump(2);
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  return detail::experiment_config_from_node(detail::parse_document(text));
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  return detail::experiment_config_to_node(config).dump(2);
}

std::string exponent_report_to_json(const ExponentReport& report) {
  return detail::exponent_report_to_node(report).dump(2);
}

}  // namespace relay
