#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <sstream>

#include "flashguard/calldata.hpp"

using namespace flashguard;
using namespace flashguard::calldata;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::ConfigError;
}

Word random_word(std::mt19937_64& rng) {
  Word w{};
  for (auto& b : w) b = static_cast<std::uint8_t>(rng());
  return w;
}

CallData random_call(std::mt19937_64& rng, int depth) {
  CallData c;
  c.selector = Selector::from_u32(static_cast<std::uint32_t>(rng()));
  std::size_t args = rng() % 5;
  for (std::size_t i = 0; i < args; ++i) c.args.push_back(random_word(rng));
  if (depth < 3) {
    std::size_t nested = rng() % 3;
    for (std::size_t i = 0; i < nested; ++i) c.nested.push_back(random_call(rng, depth + 1));
  }
  return c;
}

}  // namespace

TEST(ComputeSelector, RejectsMalformedSignatures) {
  for (const char* bad : {"transfer", "transfer(", "(address)", "transfer(address,)", "transfer(,uint256)",
                          "1transfer(uint256)", "trans fer(uint256)", "f(a))", ""})
    EXPECT_EQ(code_of([&] { compute_selector(bad); }), ErrorCode::MalformedSignature) << bad;
}

TEST(ComputeSelector, AcceptsEmptyParameterList) {
  EXPECT_NO_THROW(compute_selector("pause()"));
}

TEST(CallDataCodec, SelectorFirstLayout) {
  CallData c{selectors::transfer, {word(std::uint64_t{7})}, {}};
  Bytes b = encode_call(c);
  ASSERT_EQ(b.size(), 36u);
  EXPECT_EQ(b[0], 0xa9);
  EXPECT_EQ(b[35], 7);
  EXPECT_EQ(encoded_size(c), b.size());
}

TEST(CallDataCodec, RoundTripProperty) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 500; ++i) {
    CallData c = random_call(rng, 0);
    Bytes b = encode_call(c);
    EXPECT_EQ(b.size(), encoded_size(c));
    EXPECT_EQ(decode_call(b), c);
  }
}

TEST(CallDataCodec, TruncationIsDetected) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    CallData c = random_call(rng, 0);
    Bytes b = encode_call(c);
    if (b.size() <= 4) continue;
    std::size_t cut = 1 + rng() % (b.size() - 1);
    Bytes t(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
    // A cut on a word boundary that drops only trailing arguments still decodes.
    try {
      CallData d = decode_call(t);
      EXPECT_NE(d, c);
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::TruncatedInput || e.code() == ErrorCode::LengthMismatch);
    }
  }
}

TEST(CallDataCodec, ShortInputs) {
  EXPECT_EQ(code_of([] { decode_call(Bytes{0xa9, 0x05, 0x9c}); }), ErrorCode::TruncatedInput);
  Bytes partial = encode_call({selectors::transfer, {word(std::uint64_t{1})}, {}});
  partial.pop_back();
  EXPECT_EQ(code_of([&] { decode_call(partial); }), ErrorCode::TruncatedInput);
}

TEST(CallDataCodec, ArgumentAfterNestedBlobIsRejected) {
  CallData inner{selectors::approve, {}, {}};
  Bytes b = encode_call({selectors::execute, {}, {inner}});
  Word w = word(std::uint64_t{5});
  b.insert(b.end(), w.begin(), w.end());
  EXPECT_EQ(code_of([&] { decode_call(b); }), ErrorCode::LengthMismatch);
}

TEST(CallDataCodec, TagCollisionIsRejectedOnEncode) {
  Bytes b = encode_call({selectors::execute, {}, {CallData{selectors::approve, {}, {}}}});
  Word tag{};
  std::copy(b.begin() + 4, b.begin() + 36, tag.begin());
  ASSERT_TRUE(is_nested_tag(tag));
  EXPECT_EQ(code_of([&] { encode_call({selectors::transfer, {tag}, {}}); }), ErrorCode::LengthMismatch);
}

TEST(ScanEmbedded, FindsNestedKnownSelectors) {
  auto db = SignatureDatabase::builtin();
  CallData loan{selectors::flash_loan_a, {}, {CallData{selectors::approve, {}, {}}, CallData{selectors::transfer, {}, {}}}};
  Bytes b = encode_call({selectors::execute, {}, {loan}});
  auto found = scan_embedded_selectors(b, db);
  EXPECT_EQ(found, (std::set<Selector>{selectors::flash_loan_a, selectors::approve, selectors::transfer}));
}

TEST(ScanEmbedded, ToleratesGarbage) {
  auto db = SignatureDatabase::builtin();
  Bytes b = {0xa9, 0x05, 0x9c, 0xbb, 0x01, 0x02};
  EXPECT_EQ(scan_embedded_selectors(b, db), std::set<Selector>{selectors::transfer});
  EXPECT_TRUE(scan_embedded_selectors(Bytes{}, db).empty());
}

TEST(SignatureDb, BuiltinClasses) {
  auto db = SignatureDatabase::builtin();
  EXPECT_EQ(db.classify(selectors::flash_loan_a), SignatureClass::FlashLoan);
  EXPECT_EQ(db.classify(selectors::flash_loan_b), SignatureClass::FlashLoan);
  EXPECT_EQ(db.classify(selectors::transfer), SignatureClass::Transfer);
  EXPECT_EQ(db.classify(selectors::approve), SignatureClass::Approval);
  EXPECT_EQ(db.classify(selectors::withdraw), SignatureClass::Withdrawal);
  EXPECT_FALSE(db.classify(selectors::transfer_from));
  EXPECT_EQ(db.size(), 5u);
}

TEST(SignatureDb, OverlapIsRejected) {
  auto db = SignatureDatabase::builtin();
  SignatureEntry e{SignatureClass::Approval, selectors::transfer, "transfer(address,uint256)", "", ""};
  EXPECT_EQ(code_of([&] { db.add(e); }), ErrorCode::ClassOverlap);
}

TEST(SignatureDb, WriteParseRoundTrip) {
  auto db = SignatureDatabase::builtin();
  db.register_flash_loan_provider(compute_selector("flash(address,uint256,bytes)"), "flash(address,uint256,bytes)",
                                  "lender-c");
  std::stringstream ss;
  db.write(ss);
  auto back = SignatureDatabase::parse(ss);
  ASSERT_EQ(back.size(), db.size());
  for (const auto& e : db.entries()) EXPECT_EQ(back.classify(e.selector), e.cls);
  EXPECT_EQ(back.provider(compute_selector("flash(address,uint256,bytes)")), "lender-c");
}

TEST(SignatureDb, ParseErrorsCarryLine) {
  std::stringstream ss("# header\ntransfer,a9059cbb,transfer(address,uint256),\nbogus\n");
  try {
    SignatureDatabase::parse(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}
