#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace partpq {

// Reserved sentinels of the label model.
inline constexpr uint16_t kVoidClass = 0;    // scene-level void
inline constexpr uint16_t kNoPart = 0;       // part-level void / "no part"
inline constexpr uint16_t kNoInstance = 0xFFFF;

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One pixel's (scene class, part class, instance id) assignment.
struct LabelTriple {
  uint16_t sid = kVoidClass;
  uint16_t iid = kNoInstance;
  uint16_t pid = kNoPart;

  bool is_void() const { return sid == kVoidClass; }
  bool has_instance() const { return iid != kNoInstance; }
  bool has_part() const { return pid != kNoPart; }

  friend bool operator==(const LabelTriple&, const LabelTriple&) = default;
};

inline LabelTriple make_void() { return LabelTriple{}; }

inline LabelTriple make_label(uint16_t sid) { return LabelTriple{sid, kNoInstance, kNoPart}; }

inline LabelTriple make_label(uint16_t sid, uint16_t iid) { return LabelTriple{sid, iid, kNoPart}; }

inline LabelTriple make_label(uint16_t sid, uint16_t iid, uint16_t pid) {
  return LabelTriple{sid, iid, pid};
}

inline std::string to_string(const LabelTriple& t) {
  std::ostringstream os;
  os << "(" << t.sid;
  if (t.has_instance()) os << ", iid " << t.iid;
  if (t.has_part()) os << ", pid " << t.pid;
  os << ")";
  return os.str();
}

// Dense row-major grid of label triples.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<LabelTriple> pixels;

  LabelMap() = default;
  LabelMap(int w, int h) : width(w), height(h), pixels(static_cast<size_t>(w) * h) {}

  int64_t size() const { return static_cast<int64_t>(width) * height; }
  int64_t index(int x, int y) const { return static_cast<int64_t>(y) * width + x; }
  LabelTriple& at(int x, int y) { return pixels[index(x, y)]; }
  const LabelTriple& at(int x, int y) const { return pixels[index(x, y)]; }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;
};

// A single-plane integer label image (scene ids, part ids or group ids).
// 0 is void/background.
struct IdMap {
  int width = 0;
  int height = 0;
  std::vector<int32_t> labels;

  IdMap() = default;
  IdMap(int w, int h) : width(w), height(h), labels(static_cast<size_t>(w) * h, 0) {}

  int64_t size() const { return static_cast<int64_t>(width) * height; }

  friend bool operator==(const IdMap&, const IdMap&) = default;
};

inline void require_same_shape(int wa, int ha, int wb, int hb, const char* what) {
  if (wa != wb || ha != hb) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << wa << "x" << ha << " vs " << wb << "x" << hb << ")";
    throw EvalError(os.str());
  }
}

}  // namespace partpq
