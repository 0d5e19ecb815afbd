#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "partpq/core.hpp"
#include "partpq/metrics.hpp"

namespace partpq {

enum class ReportFormat { Json, Csv };

inline ReportFormat report_format_from_path(const std::string& path) {
  if (path.ends_with(".csv")) return ReportFormat::Csv;
  return ReportFormat::Json;
}

namespace detail {

// Fixed 1-decimal percent, the display convention of the result tables.
inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
  return buf;
}

inline nlohmann::ordered_json metric_block_to_json(const MetricBlock& block) {
  nlohmann::ordered_json j;
  j["metric"] = block.metric;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& m : block.classes) {
    nlohmann::ordered_json jc;
    jc["sid"] = m.sid;
    jc["name"] = m.name;
    jc["kind"] = to_string(m.kind);
    jc["has_parts"] = m.has_parts;
    jc["defined"] = m.defined;
    jc["partpq"] = m.pq;
    jc["partsq"] = m.sq;
    jc["partrq"] = m.rq;
    jc["tp"] = m.tp;
    jc["fp"] = m.fp;
    jc["fn"] = m.fn;
    jc["display"] = {{"partpq", percent(m.pq)}, {"partsq", percent(m.sq)},
                     {"partrq", percent(m.rq)}};
    j["classes"].push_back(std::move(jc));
  }
  j["aggregates"] = nlohmann::ordered_json::object();
  for (const auto& [key, agg] : block.aggregates) {
    j["aggregates"][key] = {{"partpq", agg.pq},
                            {"partsq", agg.sq},
                            {"partrq", agg.rq},
                            {"num_classes", agg.num_classes},
                            {"display",
                             {{"partpq", percent(agg.pq)},
                              {"partsq", percent(agg.sq)},
                              {"partrq", percent(agg.rq)}}}};
  }
  return j;
}

inline nlohmann::ordered_json miou_block_to_json(const MiouBlock& block) {
  nlohmann::ordered_json j;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& e : block.classes)
    j["classes"].push_back(
        {{"id", e.id}, {"name", e.name}, {"defined", e.defined}, {"iou", e.iou}});
  j["mean"] = block.mean;
  j["num_classes"] = block.num_classes;
  j["display"] = percent(block.mean);
  return j;
}

inline nlohmann::ordered_json mpa_block_to_json(const MpaBlock& block) {
  nlohmann::ordered_json j;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& e : block.classes)
    j["classes"].push_back(
        {{"id", e.id}, {"name", e.name}, {"defined", e.defined}, {"accuracy", e.accuracy}});
  j["mean"] = block.mean;
  j["num_classes"] = block.num_classes;
  j["display"] = percent(block.mean);
  return j;
}

}  // namespace detail

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["spec"] = report.spec_name;
  j["partpq"] = detail::metric_block_to_json(report.partpq);
  if (report.pq) j["pq"] = detail::metric_block_to_json(*report.pq);
  if (report.miou) j["miou"] = detail::miou_block_to_json(*report.miou);
  if (report.mpa) j["mpa"] = detail::mpa_block_to_json(*report.mpa);
  return j;
}

// One row per class plus the All/P/NP/Things/Stuff aggregate rows, metric
// columns in table-style percent.
inline std::string report_to_csv(const EvalReport& report) {
  std::ostringstream os;
  const bool with_pq = report.pq.has_value();
  os << "class,partpq,partsq,partrq,tp,fp,fn";
  if (with_pq) os << ",pq,sq,rq";
  os << "\n";
  for (size_t i = 0; i < report.partpq.classes.size(); ++i) {
    const auto& m = report.partpq.classes[i];
    os << m.name << "," << detail::percent(m.pq) << "," << detail::percent(m.sq) << ","
       << detail::percent(m.rq) << "," << m.tp << "," << m.fp << "," << m.fn;
    if (with_pq) {
      const auto& q = report.pq->classes[i];
      os << "," << detail::percent(q.pq) << "," << detail::percent(q.sq) << ","
         << detail::percent(q.rq);
    }
    os << "\n";
  }
  for (const char* key : {"All", "P", "NP", "Things", "Stuff"}) {
    const auto& agg = report.partpq.aggregates.at(key);
    os << key << "," << detail::percent(agg.pq) << "," << detail::percent(agg.sq) << ","
       << detail::percent(agg.rq) << ",,,";
    if (with_pq) {
      const auto& q = report.pq->aggregates.at(key);
      os << "," << detail::percent(q.pq) << "," << detail::percent(q.sq) << ","
         << detail::percent(q.rq);
    }
    os << "\n";
  }
  return os.str();
}

inline std::string report_to_string(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) return report_to_csv(report);
  return report_to_json(report).dump(2) + "\n";
}

// Deterministic bytes: stable key order and fixed formatting.
inline void write_report(const EvalReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + path);
  out << report_to_string(report, format);
  if (!out) throw IoError("failed writing report to " + path);
}

inline nlohmann::ordered_json sig_report_to_json(const SigReport& report) {
  nlohmann::ordered_json j;
  j["spec"] = report.spec_name;
  j["classes"] = nlohmann::ordered_json::array();
  for (const auto& e : report.classes) {
    nlohmann::ordered_json jc;
    jc["sid"] = e.sid;
    jc["name"] = e.name;
    jc["has_parts"] = e.has_parts;
    jc["defined"] = e.defined;
    if (e.defined)
      jc["sig"] = e.sig;
    else
      jc["sig"] = nullptr;
    j["classes"].push_back(std::move(jc));
  }
  if (report.msig_defined)
    j["msig"] = report.msig;
  else
    j["msig"] = nullptr;
  return j;
}

inline void write_sig_report(const nlohmann::ordered_json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing report to " + path);
}

}  // namespace partpq
