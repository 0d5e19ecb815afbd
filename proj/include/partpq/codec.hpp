#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "partpq/core.hpp"
#include "partpq/dataset_spec.hpp"

namespace partpq {

inline constexpr uint32_t kMaxUid = 9'999'999;

// Packed decimal uid: 0 = void, s or ss = bare scene class, sssiii = class +
// instance, sssiiipp with the class in the top two digits = class + instance +
// part. Stuff-with-parts keeps the instance digits at 0.
inline uint32_t encode_uid(const LabelTriple& t) {
  if (t.is_void()) return 0;
  if (t.sid > 99)
    throw CodecError("sid " + std::to_string(t.sid) +
                     " exceeds the packed codec limit of 99; use the planar format");
  if (t.has_instance() && t.iid > 999)
    throw CodecError("iid " + std::to_string(t.iid) + " exceeds the packed codec limit of 999");
  if (t.has_part() && t.pid > 99)
    throw CodecError("pid " + std::to_string(t.pid) + " exceeds the packed codec limit of 99");
  if (!t.has_part()) {
    return t.has_instance() ? uint32_t(t.sid) * 1000 + t.iid : uint32_t(t.sid);
  }
  const uint32_t iid_digits = t.has_instance() ? t.iid : 0;
  return uint32_t(t.sid) * 100000 + iid_digits * 100 + t.pid;
}

// Digit-level inverse of encode_uid; performs no spec validation. Throws on
// values no valid triple can encode to.
inline LabelTriple decode_uid_structural(uint32_t uid) {
  if (uid > kMaxUid) throw CodecError("uid " + std::to_string(uid) + " out of range");
  if (uid == 0) return make_void();
  if (uid <= 99) return make_label(uint16_t(uid));
  if (uid <= 999)
    throw CodecError("uid " + std::to_string(uid) + " is not decodable (3-digit values are unused)");
  if (uid <= 99999) return make_label(uint16_t(uid / 1000), uint16_t(uid % 1000));
  LabelTriple t;
  t.sid = uint16_t(uid / 100000);
  t.iid = uint16_t((uid / 100) % 1000);
  t.pid = uint16_t(uid % 100);
  if (t.pid == kNoPart) t = make_label(t.sid, t.iid);  // non-canonical part-void form
  return t;
}

// Spec-aware decode: canonicalizes the stuff instance digits and rejects
// triples the spec does not admit.
inline LabelTriple decode_uid(uint32_t uid, const DatasetSpec& spec) {
  LabelTriple t = decode_uid_structural(uid);
  if (t.is_void()) return t;
  const SceneClass* c = spec.find(t.sid);
  if (!c)
    throw CodecError("uid " + std::to_string(uid) + " decodes to unknown sid " +
                     std::to_string(t.sid));
  if (c->is_stuff() && t.has_instance()) {
    if (t.iid != 0)
      throw CodecError("uid " + std::to_string(uid) + ": instance id on stuff class \"" + c->name +
                       "\"");
    t.iid = kNoInstance;  // stuff-with-parts carries zeroed instance digits
  }
  if (t.has_part()) {
    if (!c->has_parts())
      throw CodecError("uid " + std::to_string(uid) + ": part id on no-parts class \"" + c->name +
                       "\"");
    if (c->part_index(t.pid) < 0)
      throw CodecError("uid " + std::to_string(uid) + ": pid " + std::to_string(t.pid) +
                       " is not a part of class \"" + c->name + "\"");
  }
  return t;
}

struct Violation {
  int64_t pixel = 0;
  LabelTriple label;
  std::string rule;
};

inline std::string to_string(const Violation& v) {
  std::string s = "pixel " + std::to_string(v.pixel) + " " + to_string(v.label);
  bool packable = v.label.sid <= 99 && (!v.label.has_instance() || v.label.iid <= 999) &&
                  (!v.label.has_part() || v.label.pid <= 99);
  if (packable) {
    // reproduce the raw digits even for triples encode_uid would reject
    uint32_t uid = v.label.is_void() ? 0
                   : v.label.has_part()
                       ? uint32_t(v.label.sid) * 100000 +
                             (v.label.has_instance() ? v.label.iid : 0) * 100 + v.label.pid
                   : v.label.has_instance() ? uint32_t(v.label.sid) * 1000 + v.label.iid
                                            : uint32_t(v.label.sid);
    s += " uid " + std::to_string(uid);
  }
  return s + ": " + v.rule;
}

// Checks every pixel against the legal label combinations. Total: arbitrary
// pixel values become violations, never failures.
inline std::vector<Violation> validate_map(const LabelMap& map, const DatasetSpec& spec) {
  std::vector<Violation> out;
  for (int64_t i = 0; i < map.size(); ++i) {
    const LabelTriple& t = map.pixels[i];
    if (t.is_void()) {
      if (t.has_instance()) out.push_back({i, t, "instance on void"});
      if (t.has_part()) out.push_back({i, t, "part on void"});
      continue;
    }
    const SceneClass* c = spec.find(t.sid);
    if (!c) {
      out.push_back({i, t, "unknown sid"});
      continue;
    }
    if (t.has_instance() && c->is_stuff()) out.push_back({i, t, "instance on stuff"});
    if (t.has_part()) {
      if (!c->has_parts()) {
        out.push_back({i, t, "part on L^no-parts class"});
      } else if (c->part_index(t.pid) < 0) {
        out.push_back({i, t, "unknown pid for class"});
      }
      if (c->is_things() && !t.has_instance())
        out.push_back({i, t, "part label on things pixel without instance id"});
    }
  }
  return out;
}

}  // namespace partpq
