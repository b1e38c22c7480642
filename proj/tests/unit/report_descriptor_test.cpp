#include "hidsense/descriptors.hpp"

#include <gtest/gtest.h>

using namespace hidsense;
using namespace hidsense::descriptors;

namespace {

Bytes expected_report_bytes() {
  Bytes b = {0x06, 0xA0, 0xFF, 0x09, 0x01, 0xA1, 0x01};
  const std::uint8_t usages[3] = {0x03, 0x04, 0x05};
  const std::uint8_t counts[3] = {4, 4, 2};
  const std::uint8_t mains[3] = {0x81, 0x91, 0xB1};
  for (int i = 0; i < 3; ++i) {
    b.insert(b.end(), {0x09, usages[i], 0x15, 0x00, 0x26, 0xFF, 0x00, 0x75, 0x08, 0x95, counts[i],
                       mains[i], 0x02});
  }
  b.push_back(0xC0);
  return b;
}

}  // namespace

TEST(ReportDescriptor, ReferenceBytes) {
  const auto bytes = serialize(build_reference_report_descriptor());
  EXPECT_EQ(bytes.size(), 47u);
  EXPECT_EQ(bytes, expected_report_bytes());
}

TEST(ReportDescriptor, ReferenceItemsAndSummary) {
  const auto report = build_reference_report_descriptor();
  EXPECT_EQ(report.items.size(), 22u);
  EXPECT_EQ(report.items.front().name(), "USAGE_PAGE");
  EXPECT_EQ(report.items.back().name(), "END_COLLECTION");
  EXPECT_EQ(report.summary(), (ReportSummary{4, 4, 2}));
  EXPECT_EQ(parse_report_descriptor(expected_report_bytes()), report);
}

TEST(ReportDescriptor, ItemPrefixes) {
  EXPECT_EQ(make_item(ItemType::Global, tag::kUsagePage, 0xFFA0).prefix(), 0x06);
  EXPECT_EQ(make_item(ItemType::Main, tag::kEndCollection, 0, 0).prefix(), 0xC0);
  EXPECT_EQ(make_item(ItemType::Global, tag::kLogicalMaximum, 255).prefix(), 0x25);
  EXPECT_EQ(make_item(ItemType::Global, tag::kLogicalMaximum, 255, 2).prefix(), 0x26);
  EXPECT_EQ(make_item(ItemType::Global, tag::kLogicalMaximum, 0x10000).size, 4);
  EXPECT_EQ(make_item(ItemType::Local, tag::kUsage, 1).prefix(), 0x09);
}

TEST(ReportDescriptor, ParseErrors) {
  auto truncated = expected_report_bytes();
  truncated.resize(2);
  EXPECT_THROW(parse_report_descriptor(truncated), ParseError);
  EXPECT_THROW(parse_report_descriptor(Bytes{0xFE, 0x00, 0x01}), ParseError);
  EXPECT_THROW(parse_report_descriptor(Bytes{0xC0}), ParseError);
  EXPECT_THROW(parse_report_descriptor(Bytes{0xA1, 0x01}), ParseError);
  EXPECT_EQ(parse_report_descriptor(Bytes{}).items.size(), 0u);
}

TEST(ReportDescriptor, SummaryRoundsUpAndHonorsPushPop) {
  // 3 bits of input -> 1 byte; PUSH/POP restores the 8-bit size
  const Bytes bytes = {
      0x75, 0x08, 0x95, 0x02,  // size 8, count 2
      0xA4,                    // PUSH
      0x75, 0x01, 0x95, 0x03,  // size 1, count 3
      0x81, 0x02,              // INPUT: 3 bits
      0xB4,                    // POP
      0x81, 0x02,              // INPUT: 16 bits
      0x91, 0x02,              // OUTPUT: 16 bits
  };
  EXPECT_EQ(parse_report_descriptor(bytes).summary(), (ReportSummary{3, 2, 0}));
}
