#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace partpq;
using testutil::cpp_spec;
using testutil::tiny_spec;

TEST_CASE("encode_uid packs the decimal forms", "[codec]") {
  CHECK(encode_uid(make_void()) == 0);
  CHECK(encode_uid(make_label(26)) == 26);                 // crowd / bare class
  CHECK(encode_uid(make_label(26, 31)) == 26031);
  CHECK(encode_uid(make_label(26, 31, 4)) == 2603104);
  CHECK(encode_uid(make_label(26, 0)) == 26000);           // instance id 0 is real
  CHECK(encode_uid(make_label(7)) == 7);
  // stuff-with-parts keeps the instance digits at zero
  LabelTriple lawn = make_label(9);
  lawn.pid = 2;
  CHECK(encode_uid(lawn) == 900002);
}

TEST_CASE("encode_uid rejects values beyond the packed ranges", "[codec]") {
  CHECK_THROWS_AS(encode_uid(make_label(100)), CodecError);
  CHECK_THROWS_AS(encode_uid(make_label(26, 1000)), CodecError);
  CHECK_THROWS_AS(encode_uid(make_label(26, 1, 100)), CodecError);
}

TEST_CASE("decode_uid inverts the packing and validates against the spec", "[codec]") {
  const DatasetSpec& spec = cpp_spec();
  CHECK(decode_uid(0, spec) == make_void());
  CHECK(decode_uid(23, spec) == make_label(23));
  CHECK(decode_uid(2603104, spec) == make_label(26, 31, 4));
  CHECK(decode_uid(26031, spec) == make_label(26, 31));
  // stuff-with-parts canonicalization
  LabelTriple lawn = make_label(9);
  lawn.pid = 2;
  CHECK(decode_uid(900002, tiny_spec()) == lawn);
  // non-canonical part-void form decodes to the instance form
  CHECK(decode_uid(2603100, spec) == make_label(26, 31));

  CHECK_THROWS_AS(decode_uid(9999999, spec), CodecError);  // sid 99 undefined
  CHECK_THROWS_AS(decode_uid(500, spec), CodecError);      // 3-digit band unused
  CHECK_THROWS_AS(decode_uid(10000000, spec), CodecError);
  CHECK_THROWS_AS(decode_uid(7007, spec), CodecError);     // instance on stuff (road)
  CHECK_THROWS_AS(decode_uid(2600107, spec), CodecError);  // pid 7 not a car part
  CHECK_THROWS_AS(decode_uid(2300101, spec), CodecError);  // parts on sky
}

TEST_CASE("uid round-trip holds for random valid triples", "[codec]") {
  const DatasetSpec& spec = tiny_spec();
  CounterRng rng(2024);
  const auto& classes = spec.classes();
  for (int i = 0; i < 10000; ++i) {
    const SceneClass& c = classes[rng.next_below(classes.size())];
    LabelTriple t = make_label(c.sid);
    if (c.is_things()) t.iid = uint16_t(rng.next_below(1000));
    if (c.has_parts() && (c.is_stuff() || t.has_instance()) && rng.next_bernoulli(0.7))
      t.pid = c.parts[rng.next_below(c.parts.size())].pid;
    CHECK(decode_uid(encode_uid(t), spec) == t);
  }
}

TEST_CASE("validate_map flags the illegal combinations", "[codec]") {
  const DatasetSpec& spec = cpp_spec();
  LabelMap map(4, 1);
  map.at(0, 0) = make_label(23);        // sky, fine
  map.at(1, 0) = make_label(23);
  map.at(1, 0).pid = 1;                 // part on sky
  map.at(2, 0) = make_label(7, 3);      // instance on road
  map.at(3, 0) = make_label(26, 1, 2);  // fine

  const auto violations = validate_map(map, spec);
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].pixel == 1);
  CHECK(violations[0].rule == "part on L^no-parts class");
  CHECK(violations[1].pixel == 2);
  CHECK(violations[1].rule == "instance on stuff");
}

TEST_CASE("validate_map accepts crowd and rejects parts on crowd", "[codec]") {
  const DatasetSpec& spec = cpp_spec();
  LabelMap map(3, 1);
  map.at(0, 0) = make_label(26);  // car crowd region
  map.at(1, 0) = make_label(26);
  map.at(1, 0).pid = 2;           // crowd pixels cannot carry parts
  map.at(2, 0) = make_label(99);  // unknown sid
  const auto violations = validate_map(map, spec);
  REQUIRE(violations.size() == 2);
  CHECK(violations[0].rule == "part label on things pixel without instance id");
  CHECK(violations[1].rule == "unknown sid");
}

TEST_CASE("validate_map is total over arbitrary pixel values", "[codec]") {
  const DatasetSpec& spec = tiny_spec();
  CounterRng rng(7);
  LabelMap map(64, 64);
  for (auto& t : map.pixels) {
    t.sid = uint16_t(rng.next_below(16));
    t.iid = rng.next_bernoulli(0.5) ? uint16_t(rng.next_below(8)) : kNoInstance;
    t.pid = uint16_t(rng.next_below(4));
  }
  CHECK_NOTHROW(validate_map(map, spec));
}
