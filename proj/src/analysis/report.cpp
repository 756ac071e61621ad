#include "fsm/analysis.hpp"

#include "json.hpp"

#include <cstdio>
#include <ostream>

namespace fsm {

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

nlohmann::ordered_json parse_config(const std::string& config_json) {
  if (config_json.empty()) return nlohmann::ordered_json::object();
  return nlohmann::ordered_json::parse(config_json);
}

}  // namespace

void write_csv(std::ostream& os, std::span<const ErrorRecord> records, const std::string& config_json) {
  os << "# format_version=" << kFormatVersion << '\n';
  os << "# config=" << parse_config(config_json).dump() << '\n';
  os << "M,N,K,r,t,i,strategy,lambda_sigma,err_val,err_vec,scf_count,epsilon_bound,converged\n";
  for (const auto& r : records) {
    os << r.params.M << ',' << r.params.N << ',' << r.params.K << ',' << g17(r.params.r) << ',' << g17(r.t) << ','
       << r.i << ',' << r.strategy << ',' << g17(r.lambda_sigma) << ',' << g17(r.err_val) << ',' << g17(r.err_vec)
       << ',' << r.scf_count << ',' << g17(r.epsilon_bound) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_audit_jsonl(std::ostream& os, std::span<const BoundAudit> audits, const std::string& config_json) {
  nlohmann::ordered_json header;
  header["format_version"] = kFormatVersion;
  header["config"] = parse_config(config_json);
  os << header.dump() << '\n';
  for (const auto& a : audits) {
    nlohmann::ordered_json j;
    j["name"] = a.name;
    j["lhs"] = a.lhs;
    j["rhs"] = a.rhs;
    j["satisfied"] = a.satisfied;
    j["skipped"] = a.skipped;
    if (a.skipped) j["reason"] = a.reason;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
    for (const auto& [k, v] : a.inputs) inputs[k] = v;
    j["inputs"] = std::move(inputs);
    os << j.dump() << '\n';
  }
}

}  // namespace fsm
