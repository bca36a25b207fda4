#include <random>

#include "darkamp/dns.hpp"
#include "darkamp/error.hpp"
#include "darkamp/synth.hpp"
#include "doctest.h"
#include "frames.hpp"

using namespace darkamp;
using namespace darkamp::testing;

namespace {

std::vector<std::uint8_t> query_header(std::uint16_t id = 0x1234, std::uint16_t flags = 0x0100, std::uint16_t qd = 1) {
  std::vector<std::uint8_t> v;
  push16(v, id);
  push16(v, flags);
  push16(v, qd);
  push16(v, 0);
  push16(v, 0);
  push16(v, 0);
  return v;
}

void append(std::vector<std::uint8_t>& v, std::initializer_list<int> bytes) {
  for (int b : bytes) v.push_back(static_cast<std::uint8_t>(b));
}

ErrorCode parse_error(const std::vector<std::uint8_t>& payload) {
  try {
    parse_dns_query(payload);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse_dns_query to throw");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("ripe.net ANY question") {
  auto q = parse_dns_query(ripe_net_any_query(7));
  REQUIRE(q.has_value());
  CHECK(q->transaction_id == 7);
  CHECK(q->is_query);
  CHECK(q->qname == "ripe.net");
  CHECK(q->qtype == qtype::ANY);
  CHECK(q->qtype_name() == "ANY");
  CHECK(q->qclass == 1);
}

TEST_CASE("root ANY question") {
  auto v = query_header();
  append(v, {0x00, 0x00, 0xff, 0x00, 0x01});
  auto q = parse_dns_query(v);
  REQUIRE(q.has_value());
  CHECK(q->qname == ".");
  CHECK(q->qtype == 255);
}

TEST_CASE("self-referencing compression pointer is a loop") {
  auto v = query_header();
  append(v, {0xc0, 0x0c, 0x00, 0xff, 0x00, 0x01});
  CHECK(parse_error(v) == ErrorCode::CompressionLoop);
}

TEST_CASE("pointer cycle through an earlier label is a loop") {
  auto v = query_header();
  append(v, {0x03, 'a', 'b', 'c', 0xc0, 0x0c, 0x00, 0x01, 0x00, 0x01});
  CHECK(parse_error(v) == ErrorCode::CompressionLoop);
}

TEST_CASE("forward pointer is rejected") {
  auto v = query_header();
  append(v, {0xc0, 0x20, 0x00, 0x01, 0x00, 0x01});
  v.resize(0x30, 0);
  CHECK(parse_error(v) == ErrorCode::CompressionLoop);
}

TEST_CASE("backward pointer into earlier bytes is followed") {
  // ID 0x0178 and flags 0x0100 read as labels "x" and "\000", then QDCOUNT's high byte ends the name.
  auto v = query_header(0x0178, 0x0100, 1);
  append(v, {0xc0, 0x00, 0x00, 0x10, 0x00, 0x01});
  auto q = parse_dns_query(v);
  REQUIRE(q.has_value());
  CHECK(q->qname == "x.\\000");
  CHECK(q->qtype == qtype::TXT);
}

TEST_CASE("responses and empty questions are skipped with a reason") {
  DnsSkip why = DnsSkip::None;
  auto resp = ripe_net_any_query();
  resp[2] |= 0x80;
  CHECK_FALSE(parse_dns_query(resp, &why));
  CHECK(why == DnsSkip::Response);

  CHECK_FALSE(parse_dns_query(query_header(1, 0x0100, 0), &why));
  CHECK(why == DnsSkip::NoQuestion);
}

TEST_CASE("truncation and bad label bytes are malformed") {
  CHECK(parse_error({1, 2, 3}) == ErrorCode::MalformedDns);
  auto q = ripe_net_any_query();
  q.resize(q.size() - 2);
  CHECK(parse_error(q) == ErrorCode::MalformedDns);
  auto v = query_header();
  append(v, {0x05, 'a', 'b'});
  CHECK(parse_error(v) == ErrorCode::MalformedDns);
  auto ext = query_header();
  append(ext, {0x41, 0, 0, 1, 0, 1});
  CHECK(parse_error(ext) == ErrorCode::MalformedDns);
}

TEST_CASE("only the first question is used") {
  auto v = query_header(9, 0x0100, 2);
  append(v, {0x02, 'n', 'l', 0x00, 0x00, 0x01, 0x00, 0x01});
  append(v, {0x02, 'd', 'e', 0x00, 0x00, 0xff, 0x00, 0x01});
  auto q = parse_dns_query(v);
  REQUIRE(q.has_value());
  CHECK(q->qname == "nl");
  CHECK(q->qtype == qtype::A);
}

TEST_CASE("uppercase wire names are lowercased") {
  auto v = query_header();
  append(v, {0x04, 'R', 'I', 'P', 'E', 0x03, 'N', 'e', 'T', 0x00, 0x00, 0xff, 0x00, 0x01});
  CHECK(parse_dns_query(v)->qname == "ripe.net");
}

TEST_CASE("qtype names") {
  const std::pair<std::uint16_t, const char*> table[] = {
      {255, "ANY"}, {1, "A"}, {16, "TXT"}, {15, "MX"}, {12, "PTR"}, {28, "AAAA"}, {46, "RRSIG"}};
  for (auto [code, name] : table) {
    CHECK(qtype_name(code) == name);
    CHECK(qtype_from_name(name) == code);
  }
  CHECK(qtype_name(4242) == "TYPE4242");
  CHECK(qtype_from_name("type4242") == 4242);
  CHECK(qtype_from_name("any") == 255);
  CHECK_FALSE(qtype_from_name("NOPE").has_value());
}

TEST_CASE("normalization is case-insensitive and idempotent") {
  CHECK(normalize_qname("RIPE.NET") == normalize_qname("ripe.net"));
  CHECK(normalize_qname("Ripe.Net.") == "ripe.net");
  CHECK(normalize_qname(".") == ".");
  CHECK(normalize_qname("") == ".");
  CHECK(normalize_qname("a\\.b.c") == "a\\.b.c");
  CHECK(normalize_qname("A\\066C") == "abc");
  CHECK(normalize_qname("x\\000y") == "x\\000y");

  std::mt19937_64 rng(5);
  const std::string alphabet = "abcXYZ019-_.\\ \x7f";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    int len = static_cast<int>(rng() % 20);
    for (int k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
    std::string once;
    try {
      once = normalize_qname(s);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidName);
      continue;
    }
    CHECK(normalize_qname(once) == once);
    std::string upper = s;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    CHECK(normalize_qname(upper) == once);
  }
}

TEST_CASE("invalid names") {
  CHECK_THROWS_AS(normalize_qname("a..b"), Error);
  CHECK_THROWS_AS(normalize_qname(std::string(64, 'a') + ".net"), Error);
  CHECK_THROWS_AS(normalize_qname("a\\"), Error);
  CHECK_THROWS_AS(normalize_qname("a\\25"), Error);
  CHECK_THROWS_AS(normalize_qname("a\\256"), Error);
  std::string long_name;
  for (int i = 0; i < 5; ++i) long_name += std::string(60, 'a') + ".";
  CHECK_THROWS_AS(normalize_qname(long_name), Error);
}

TEST_CASE("top-level label") {
  CHECK(top_level_label("ripe.net") == "net");
  CHECK(top_level_label("net") == "net");
  CHECK(top_level_label(".") == "");
  CHECK(top_level_label("a.b\\.c") == "b\\.c");
}

TEST_CASE("encoder and parser are inverse over random names") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 3000; ++i) {
    std::vector<std::string> labels(rng() % 5);
    for (auto& l : labels) {
      l.resize(1 + rng() % 20);
      for (char& c : l) c = static_cast<char>(rng() % 256);
    }
    std::string name = labels_to_name(labels);
    auto qt = static_cast<std::uint16_t>(rng());
    auto id = static_cast<std::uint16_t>(rng());
    auto wire = encode_dns_query(name, qt, id);
    auto q = parse_dns_query(wire);
    REQUIRE(q.has_value());
    CHECK(q->qname == name);
    CHECK(q->qtype == qt);
    CHECK(q->transaction_id == id);
  }
}

TEST_CASE("random payloads never escape the typed error set") {
  std::mt19937_64 rng(3);
  std::vector<std::uint8_t> buf;
  for (int i = 0; i < 50'000; ++i) {
    buf.resize(rng() % 80);
    for (auto& b : buf) b = static_cast<std::uint8_t>(rng());
    if (buf.size() > 12 && (rng() & 1)) buf[12] = static_cast<std::uint8_t>(0xc0 | (rng() & 0x3f));
    try {
      auto q = parse_dns_query(buf);
      if (q) CHECK(q->qname == normalize_qname(q->qname));
    } catch (const Error& e) {
      bool typed = e.code() == ErrorCode::MalformedDns || e.code() == ErrorCode::CompressionLoop;
      CHECK(typed);
    }
  }
}
