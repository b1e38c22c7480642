#include "hidsense/descriptors.hpp"

#include <gtest/gtest.h>

using namespace hidsense;
using namespace hidsense::descriptors;

namespace {

const Bytes kDevice = {0x12, 0x01, 0x00, 0x02, 0x00, 0x00, 0x00, 0x08, 0x34,
                       0x12, 0x01, 0x00, 0x01, 0x00, 0x01, 0x02, 0x00, 0x01};

const Bytes kConfiguration = {
    0x09, 0x02, 0x29, 0x00, 0x01, 0x01, 0x00, 0xA0, 0x32,  // configuration
    0x09, 0x04, 0x00, 0x00, 0x02, 0x03, 0x00, 0x00, 0x00,  // interface
    0x09, 0x21, 0x01, 0x01, 0x00, 0x01, 0x22, 0x2F, 0x00,  // HID
    0x07, 0x05, 0x81, 0x03, 0x04, 0x00, 0x01,              // EP1 IN
    0x07, 0x05, 0x01, 0x03, 0x04, 0x00, 0x01,              // EP1 OUT
};

Bytes utf16_descriptor(const std::string& ascii) {
  Bytes out{static_cast<std::uint8_t>(2 + 2 * ascii.size()), 0x03};
  for (char c : ascii) {
    out.push_back(static_cast<std::uint8_t>(c));
    out.push_back(0);
  }
  return out;
}

}  // namespace

TEST(Descriptors, DeviceBytes) {
  const auto set = build_reference_descriptor_set();
  EXPECT_EQ(serialize(set.device), kDevice);
  EXPECT_EQ(parse_device_descriptor(kDevice), set.device);
}

TEST(Descriptors, ConfigurationBytes) {
  const auto set = build_reference_descriptor_set();
  EXPECT_EQ(serialize(set.configuration), kConfiguration);
  EXPECT_EQ(set.configuration.computed_total_length(), 41);
  EXPECT_EQ(parse_configuration_tree(kConfiguration), set.configuration);
}

TEST(Descriptors, Ep0PacketSizeVariants) {
  for (std::uint8_t size : {8, 16, 32, 64}) {
    const auto bytes = serialize(build_reference_descriptor_set(size).device);
    EXPECT_EQ(bytes[7], size);
  }
  auto d = build_reference_descriptor_set().device;
  d.max_packet_size0 = 12;
  try {
    serialize(d);
    FAIL();
  } catch (const SerializeError& e) {
    EXPECT_NE(std::string(e.what()).find("bMaxPacketSize0"), std::string::npos);
  }
}

TEST(Descriptors, DeviceParseErrors) {
  EXPECT_THROW(parse_device_descriptor(Bytes(kDevice.begin(), kDevice.begin() + 10)), ParseError);
  auto wrong_type = kDevice;
  wrong_type[1] = 0x02;
  EXPECT_THROW(parse_device_descriptor(wrong_type), ParseError);
}

TEST(Descriptors, ConfigurationParseErrors) {
  EXPECT_THROW(parse_configuration_tree(Bytes{}), ParseError);
  auto bad_total = kConfiguration;
  bad_total[2] = 0x30;
  EXPECT_THROW(parse_configuration_tree(bad_total), ParseError);
  EXPECT_THROW(parse_configuration_tree(Bytes(kConfiguration.begin(), kConfiguration.begin() + 30)),
               ParseError);
}

TEST(Descriptors, LenientSkipsUnknownDescriptors) {
  Bytes with_extra = kConfiguration;
  with_extra.insert(with_extra.end(), {0x04, 0x42, 0xAA, 0xBB});
  with_extra[2] = static_cast<std::uint8_t>(with_extra.size());
  EXPECT_THROW(parse_configuration_tree(with_extra, ParseMode::Strict), ParseError);
  std::vector<std::string> warnings;
  const auto tree = parse_configuration_tree(with_extra, ParseMode::Lenient, &warnings);
  EXPECT_EQ(tree.endpoints.size(), 2u);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Descriptors, Endpoints) {
  const auto tree = parse_configuration_tree(kConfiguration);
  ASSERT_NE(tree.find_endpoint(0x81), nullptr);
  EXPECT_TRUE(tree.find_endpoint(0x81)->is_in());
  EXPECT_EQ(tree.find_endpoint(0x81)->number(), 1);
  EXPECT_FALSE(tree.find_endpoint(0x01)->is_in());
  EXPECT_EQ(tree.find_endpoint(0x82), nullptr);
}

TEST(Descriptors, Strings) {
  const auto set = build_reference_descriptor_set();
  EXPECT_EQ(*set.strings.descriptor(0), (Bytes{0x04, 0x03, 0x09, 0x04}));
  EXPECT_EQ(*set.strings.descriptor(1), utf16_descriptor("mikroElektronika"));
  EXPECT_EQ(set.strings.descriptor(1)->size(), 34u);
  EXPECT_EQ(*set.strings.descriptor(2), utf16_descriptor("mikroC HID Library test"));
  EXPECT_EQ(set.strings.descriptor(2)->size(), 48u);
  EXPECT_FALSE(set.strings.descriptor(3));
}

TEST(Descriptors, StringCodecs) {
  EXPECT_EQ(decode_string_descriptor(encode_string_descriptor("hello")), "hello");
  EXPECT_EQ(decode_string_descriptor(encode_string_descriptor("Temp \xC2\xB0" "C")), "Temp \xC2\xB0" "C");
  EXPECT_EQ(encode_string_descriptor("").size(), 2u);
  EXPECT_NO_THROW(encode_string_descriptor(std::string(126, 'a')));
  EXPECT_THROW(encode_string_descriptor(std::string(127, 'a')), SerializeError);
  EXPECT_THROW(encode_string_descriptor("\xC3"), SerializeError);
  EXPECT_THROW(decode_string_descriptor(Bytes{0x05, 0x03, 0x41, 0x00, 0x42}), ParseError);
  EXPECT_EQ(decode_langid_descriptor(encode_langid_descriptor({0x0409, 0x0407})),
            (std::vector<std::uint16_t>{0x0409, 0x0407}));
}

TEST(Descriptors, Annotations) {
  const auto rows = annotate_device(kDevice);
  bool saw_vid = false;
  for (const auto& r : rows) {
    if (r.field == "idVendor") {
      saw_vid = true;
      EXPECT_EQ(r.offset, 8u);
      EXPECT_EQ(r.bytes, (Bytes{0x34, 0x12}));
      EXPECT_NE(r.value.find("0x1234"), std::string::npos);
    }
  }
  EXPECT_TRUE(saw_vid);
  const auto text = render_annotations(annotate_configuration(kConfiguration));
  EXPECT_NE(text.find("wTotalLength"), std::string::npos);
  EXPECT_NE(text.find("bEndpointAddress"), std::string::npos);
  EXPECT_FALSE(annotate_report(serialize(build_reference_report_descriptor())).empty());
}
