#include <gtest/gtest.h>

#include <string>

#include "flashguard/calldata.hpp"
#include "flashguard/keccak.hpp"

using namespace flashguard;

namespace {

std::string digest(const std::string& s) { return to_hex(keccak256(std::string_view(s)), false); }

}  // namespace

TEST(Keccak, EmptyInput) {
  EXPECT_EQ(digest(""), "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470");
}

TEST(Keccak, OneByteShortOfRate) {
  EXPECT_EQ(digest(std::string(135, 'a')), "34367dc248bbd832f4e3e69dfaac2f92638bd0bbd18f2912ba4ef454919cf446");
}

TEST(Keccak, ExactlyOneRateBlock) {
  EXPECT_EQ(digest(std::string(136, 'a')), "a6c4d403279fe3e0af03729caada8374b5ca54d8065329a3ebcaeb4b60aa386e");
}

TEST(Keccak, MultiBlock) {
  EXPECT_EQ(digest(std::string(200, 'a')), "96ea54061def936c4be90b518992fdc6f12f535068a256229aca54267b4d084d");
}

TEST(Keccak, SpanAndStringAgree) {
  std::string s = "transfer(address,uint256)";
  Bytes b(s.begin(), s.end());
  EXPECT_EQ(keccak256(b), keccak256(std::string_view(s)));
}

TEST(Selector, TokenVectors) {
  EXPECT_EQ(calldata::compute_selector("transfer(address,uint256)").value(), 0xa9059cbbu);
  EXPECT_EQ(calldata::compute_selector("approve(address,uint256)").value(), 0x095ea7b3u);
  EXPECT_EQ(calldata::compute_selector("withdraw(uint256)").value(), 0x2e1a7d4du);
}

TEST(Selector, FrozenScenarioVectors) {
  EXPECT_EQ(calldata::compute_selector("transferFrom(address,address,uint256)").value(), 0x23b872ddu);
  EXPECT_EQ(calldata::compute_selector("balanceOf(address)").value(), 0x70a08231u);
  EXPECT_EQ(calldata::compute_selector("allowance(address,address)").value(), 0xdd62ed3eu);
  EXPECT_EQ(calldata::compute_selector("createLockedCampaign(uint256,uint256)").value(), 0x88a954d6u);
  EXPECT_EQ(calldata::compute_selector("cancelCampaign(uint256)").value(), 0x45598b4au);
  EXPECT_EQ(calldata::compute_selector("onFlashLoan(address,uint256,uint256)").value(), 0x6d2b653fu);
  EXPECT_EQ(calldata::compute_selector("execute(uint256)").value(), 0xfe0d94c1u);
}
